#pragma once

// Subcommand drivers behind the nehari-forge CLI. Each writes its artifacts
// into an output directory together with a manifest.json.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nehari/config.hpp"
#include "nehari/mountain_pass.hpp"
#include "nehari/operator.hpp"
#include "nehari/presets.hpp"
#include "nehari/symmetry.hpp"

namespace nehari {

enum class Command { Eigs, Solve, Continuation, Symmetry, Reproduce };

std::string to_string(Command c);
std::optional<Command> command_from_string(const std::string& name);

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 1;
inline constexpr int kExitConfigError = 2;

struct RunOptions {
  Command command = Command::Solve;
  std::filesystem::path config_file;
  /// Empty: the config's output_dir, or the working directory.
  std::filesystem::path out_dir;
  std::optional<int> resolution;
  bool quiet = false;
};

/// Loads the config, runs the command and returns the exit code. Progress
/// goes to `log` (unless quiet) and diagnostics to `err` as
/// "error: <Class>: message".
int run(const RunOptions& opts, std::ostream& log, std::ostream& err);

/// Grid, sampled potential and operator of a config.
struct Problem {
  GridPtr grid;
  Field potential;
  std::vector<Substitution> substitutions;
  Operator op;
};

/// Throws DegenerateDomain, SamplingError, ParseError.
Problem build_problem(const RunConfig& cfg);

/// Classification against the transforms that preserve domain and potential
/// and, separately, against every transform the lattice admits.
struct SymmetryPair {
  SymmetryReport invariant;
  SymmetryReport lattice;
};

SymmetryPair classify_solution(const Problem& pb, const Field& u, double threshold);

struct SolutionReport {
  std::string label;
  bool ok = false;
  std::string error_class;
  std::string error_message;
  SolveResult result;
  SymmetryPair symmetry;
  double seconds = 0.0;
};

struct SolveOutcome {
  double lambda = 0.0;
  AssumptionReport assumptions;
  std::vector<SolutionReport> solutions;
  double seconds = 0.0;
};

/// Solves for the requested branches and writes field_<label>.csv,
/// contours_<label>.svg/.csv, symmetry.json and manifest.json into `dir`.
/// Solver errors are recorded per solution, not thrown. `raw_config` is the
/// config file text hashed into the manifest (the canonical config if empty).
SolveOutcome solve_and_write(const RunConfig& cfg, const std::filesystem::path& dir,
                             bool want_gs, bool want_lens, std::ostream* log,
                             const std::string& raw_config = {});

struct ReproduceRow {
  std::string preset;
  std::string solution;
  bool ok = false;
  std::string error;
  double max = 0.0;
  double min = 0.0;
  double energy = 0.0;
  ReferenceValues reference;
  /// The solution was negated so its extrema line up with the reference.
  bool sign_flipped = false;
  int morse_index = -1;
  std::string symmetry;
  std::string lattice_symmetry;
  int iterations = 0;
  int restarts = 0;
  double seconds = 0.0;
};

/// Runs the named presets (all when empty) at the base config's resolution,
/// each into dir/<preset>, and writes dir/reproduce_table.csv. Failures mark
/// rows, they do not stop the run.
std::vector<ReproduceRow> reproduce(const RunConfig& base, const std::filesystem::path& dir,
                                    std::ostream* log);

/// 100 (computed - reference) / |reference|
double deviation_percent(double computed, double reference);

std::string reproduce_table_csv(const std::vector<ReproduceRow>& rows);

}  // namespace nehari
