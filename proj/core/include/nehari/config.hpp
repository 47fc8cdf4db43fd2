#pragma once

// Run configuration: a JSON document, optionally layered over a named
// preset, validated strictly (unknown keys are errors).

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nehari/grid.hpp"
#include "nehari/limit_flow.hpp"
#include "nehari/mountain_pass.hpp"

namespace nehari {

enum class RunMode { GroundState, Nodal, Both, Eigs, Continuation, Symmetry, Reproduce };

std::string to_string(RunMode m);

struct LambdaSpec {
  enum class Kind { Value, Lambda1, Lambda2 };
  Kind kind = Kind::Value;
  double value = 1.0;
};

struct SolverSettings {
  DescentMethod method = DescentMethod::Lbfgs;
  int max_iter = 5000;
  int memory = 8;
  double step0 = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  NodalScaling nodal_scaling = NodalScaling::Coupled;
  bool morse_check = true;
  int morse_k = 6;
  int max_restarts = 6;
  SampleOptions sampling;
};

struct ContinuationSettings {
  BranchMode branch = BranchMode::GroundState;
  std::vector<double> p_list = {3.0, 2.5, 2.2, 2.1, 2.05, 2.02};
  double lambda_factor = 1.0;
  /// Used instead of lambda_factor * lambda_i when positive.
  double lambda = 0.0;
  bool predictor = true;
};

struct RunConfig {
  std::string name;
  std::string preset;
  Domain domain = Rectangle{-1.0, 1.0, -1.0, 1.0};
  std::string potential = "0";
  LambdaSpec lambda;
  double p = 4.0;
  std::optional<RunMode> mode;
  std::string seed_gs;
  std::string seed_lens;
  int resolution = 128;

  double grad_tol = 1e-6;
  double eig_tol = 1e-8;
  double symmetry_threshold = 1e-3;

  SolverSettings solver;
  int eig_k = 6;
  ContinuationSettings continuation;
  /// Field CSV for the symmetry command, resolved against the config file's
  /// directory.
  std::string symmetry_field;
  std::vector<double> levels_gs = {1.0, 2.0};
  std::vector<double> levels_lens = {-2.0, -1.0, 1.0, 2.0};
  std::vector<std::string> reproduce_presets;
  int jobs = 1;
  std::string output_dir;
};

/// Parses and validates a JSON config. When it names a preset, the preset is
/// the starting point and the document's keys override it. Relative paths are
/// resolved against `base_dir`. Throws ConfigError.
RunConfig parse_config(std::string_view json_text,
                       const std::filesystem::path& base_dir = std::filesystem::path("."));

/// Reads and parses a config file. Throws ConfigError (including for an
/// unreadable file).
RunConfig load_config(const std::filesystem::path& file);

/// Checks ranges and that every expression parses. Throws ConfigError.
void validate(const RunConfig& cfg);

/// Every resolved field as JSON with sorted keys, compact; equal configs give
/// equal text.
std::string canonical_json(const RunConfig& cfg);

/// Solver settings for one solve of the configured problem.
SolveConfig make_solve_config(const RunConfig& cfg, double lambda, BranchMode branch);

}  // namespace nehari
