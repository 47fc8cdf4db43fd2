#include "nehari/run.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <sstream>

#include "nehari/contours.hpp"
#include "nehari/errors.hpp"
#include "nehari/io.hpp"
#include "nehari/limit_flow.hpp"
#include "nehari/spectrum.hpp"

namespace nehari {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(Command c) {
  switch (c) {
    case Command::Eigs: return "eigs";
    case Command::Solve: return "solve";
    case Command::Continuation: return "continuation";
    case Command::Symmetry: return "symmetry";
    case Command::Reproduce: return "reproduce";
  }
  return "?";
}

std::optional<Command> command_from_string(const std::string& name) {
  for (Command c : {Command::Eigs, Command::Solve, Command::Continuation, Command::Symmetry,
                    Command::Reproduce})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Errors that come from the user's input rather than from a solver.
bool is_input_error(const Error& e) {
  static const char* kInput[] = {"ConfigError", "ParseError", "UnknownIdentifier",
                                 "DegenerateDomain", "SamplingError", "GridMismatch"};
  return std::any_of(std::begin(kInput), std::end(kInput),
                     [&](const char* k) { return e.kind() == k; });
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

json assumptions_json(const AssumptionReport& r) {
  return {{"smallest_eigenvalue", r.smallest_eigenvalue},
          {"positive_definite", r.positive_definite},
          {"norm_ratio_min", r.ratio_min},
          {"norm_ratio_max", r.ratio_max},
          {"samples", r.samples},
          {"potential_finite", r.potential_finite},
          {"potential_min", r.potential_min},
          {"potential_max", r.potential_max},
          {"notes", r.notes}};
}

json grid_json(const Problem& pb) {
  json subs = json::array();
  for (const auto& s : pb.substitutions)
    subs.push_back({{"x", s.x}, {"y", s.y}, {"value", s.value}, {"reason", s.reason}});
  return {{"domain", describe(pb.grid->domain())},
          {"intervals_per_unit", pb.grid->intervals_per_unit()},
          {"spacing", pb.grid->spacing()},
          {"nodes", pb.grid->size()},
          {"potential_substitutions", subs}};
}

json classification_json(const SymmetryReport& r) {
  json out = json::array();
  for (const auto& e : r.entries)
    out.push_back({{"transform", to_string(e.kind)},
                   {"even_score", e.even_score},
                   {"odd_score", e.odd_score},
                   {"classification", to_string(e.parity)}});
  return out;
}

json symmetry_json(const SymmetryPair& s) {
  return {{"threshold", s.invariant.threshold},
          {"invariant", classification_json(s.invariant)},
          {"invariant_summary", s.invariant.summary()},
          {"lattice", classification_json(s.lattice)},
          {"lattice_summary", s.lattice.summary()}};
}

json solve_result_json(const SolveResult& r) {
  json nu = r.morse.nu;
  return {{"energy", r.energy},
          {"max", r.max},
          {"min", r.min},
          {"residual", r.residual},
          {"iterations", r.iterations},
          {"restarts", r.restarts},
          {"cg_iterations", r.cg_iterations},
          {"morse_index", r.morse_index},
          {"morse_nu", nu},
          {"morse_gap", r.morse.gap}};
}

/// Shared manifest fields. `inputs` maps names to raw input texts to hash.
json manifest_base(const RunConfig& cfg, Command cmd, const std::vector<std::pair<std::string, std::string>>& inputs) {
  const std::string canon = canonical_json(cfg);
  json in = json::object();
  for (const auto& [name, text] : inputs) in[name] = git_blob_sha1(text);
  return {{"tool", "nehari-forge"},
          {"command", to_string(cmd)},
          {"config", json::parse(canon)},
          {"config_hash", git_blob_sha1(canon)},
          {"input_hashes", in}};
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

void say(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n' << std::flush;
}

double resolve_lambda(const RunConfig& cfg, const Problem& pb) {
  switch (cfg.lambda.kind) {
    case LambdaSpec::Kind::Value: return cfg.lambda.value;
    case LambdaSpec::Kind::Lambda1: return smallest_eigenvalue(pb.op, cfg.eig_tol);
    case LambdaSpec::Kind::Lambda2: {
      EigOptions o;
      o.k = std::max(4, cfg.eig_k);
      o.tol = cfg.eig_tol;
      return eig_smallest(pb.op, o).cluster(2).eigenvalue;
    }
  }
  return cfg.lambda.value;
}

void write_field(const fs::path& path, const Field& u) { write_file_atomic(path, to_csv(u)); }

void write_contours(const fs::path& dir, const std::string& label, const Field& u,
                    const std::vector<double>& levels, const std::string& title) {
  const auto lines = extract_contours(u, levels);
  std::ostringstream csv;
  write_contours_csv(csv, lines);
  write_file_atomic(dir / ("contours_" + label + ".csv"), csv.str());
  write_file_atomic(dir / ("contours_" + label + ".svg"), contours_svg(u.grid(), lines, title));
}

json spectrum_json(const Spectrum& s, const AssumptionReport* a) {
  const PrincipalReport pr = is_unique_principal(s);
  json clusters = json::array();
  for (std::size_t i = 0; i < s.clusters.size(); ++i) {
    const auto& c = s.clusters[i];
    const auto& ev = pr.clusters[i];
    clusters.push_back({{"index", i + 1},
                        {"eigenvalue", c.eigenvalue},
                        {"multiplicity", c.multiplicity},
                        {"principal", c.principal},
                        {"residuals", c.residuals},
                        {"normalized_min", ev.normalized_min},
                        {"normalized_max", ev.normalized_max},
                        {"sign_change_edges", ev.sign_change_edges}});
  }
  json j = {{"eigenvalues", s.eigenvalues},
            {"clusters", clusters},
            {"unique_principal", s.unique_principal},
            {"iterations", s.iterations}};
  if (a) j["assumptions"] = assumptions_json(*a);
  return j;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------

int cmd_eigs(const RunConfig& cfg, const fs::path& out, const std::string& raw, std::ostream* log) {
  const auto t0 = Clock::now();
  const Problem pb = build_problem(cfg);
  json man = manifest_base(cfg, Command::Eigs, {{"config_file", raw}});
  man["grid"] = grid_json(pb);
  const AssumptionReport a = check_assumptions(pb.op);
  EigOptions o;
  o.k = cfg.eig_k;
  o.tol = cfg.eig_tol;
  o.allow_indefinite = true;
  const Spectrum s = eig_smallest(pb.op, o);
  say(log, "eigs: " + std::to_string(s.cluster_count()) + " clusters, lambda_1 = " +
               fmt("%.8g", s.clusters.front().eigenvalue));
  for (std::size_t i = 0; i < s.clusters.size(); ++i)
    for (std::size_t j = 0; j < s.clusters[i].basis.size(); ++j)
      write_field(out / ("eigenfunction_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + ".csv"),
                  s.clusters[i].basis[j]);
  const json sj = spectrum_json(s, &a);
  write_json(out / "spectrum.json", sj);
  man["spectrum"] = sj;
  man["status"] = "ok";
  man["timings"] = {{"total_s", seconds_since(t0)}};
  write_json(out / "manifest.json", man);
  return kExitOk;
}

int cmd_continuation(const RunConfig& cfg, const fs::path& out, const std::string& raw,
                     std::ostream* log) {
  const auto t0 = Clock::now();
  const Problem pb = build_problem(cfg);
  json man = manifest_base(cfg, Command::Continuation, {{"config_file", raw}});
  man["grid"] = grid_json(pb);
  const auto& ct = cfg.continuation;
  EigOptions eo;
  eo.k = std::max(cfg.eig_k, ct.branch == BranchMode::GroundState ? 2 : 4);
  eo.tol = cfg.eig_tol;
  const Spectrum s = eig_smallest(pb.op, eo);
  write_json(out / "spectrum.json", spectrum_json(s, nullptr));

  ContinuationOptions co;
  co.mode = ct.branch;
  co.p_list = ct.p_list;
  co.lambda_factor = ct.lambda_factor;
  co.lambda_override = ct.lambda;
  co.use_predictor = ct.predictor;
  co.solver = make_solve_config(cfg, 1.0, ct.branch);
  const ContinuationResult r = continuation(pb.op, s, co);

  std::ostringstream csv;
  csv << "p,energy,h_norm,rescaled_h_norm,eigenspace_distance,limit_distance,"
         "relative_limit_distance,iterations,skipped\n";
  json steps = json::array();
  bool any_skipped = false;
  for (const auto& st : r.steps) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n", st.p,
                  st.result.energy, st.h_norm, st.rescaled_h_norm, st.eigenspace_distance,
                  st.limit_distance, st.relative_limit_distance, st.result.iterations,
                  st.skipped ? 1 : 0);
    csv << buf;
    any_skipped = any_skipped || st.skipped;
    steps.push_back({{"p", st.p},
                     {"skipped", st.skipped},
                     {"note", st.note},
                     {"energy", st.result.energy},
                     {"h_norm", st.h_norm},
                     {"rescaled_h_norm", st.rescaled_h_norm},
                     {"eigenspace_distance", st.eigenspace_distance},
                     {"limit_distance", st.limit_distance},
                     {"relative_limit_distance", st.relative_limit_distance}});
    say(log, "p = " + fmt("%.4g", st.p) + (st.skipped ? "  skipped: " + st.note
                                                      : "  E = " + fmt("%.8g", st.result.energy) +
                                                            "  dist(u*) = " +
                                                            fmt("%.3e", st.relative_limit_distance)));
  }
  write_file_atomic(out / "continuation.csv", csv.str());
  write_field(out / "field_limit.csv", r.limit.u);
  for (auto it = r.steps.rbegin(); it != r.steps.rend(); ++it)
    if (!it->skipped) {
      write_field(out / "field_rescaled.csv", it->rescaled);
      break;
    }

  man["continuation"] = {{"cluster", r.cluster},
                         {"eigenvalue", r.eigenvalue},
                         {"lambda", r.lambda},
                         {"limit_energy", r.limit.energy},
                         {"limit_scale", r.limit.scale},
                         {"limit_coefficients", r.limit.coefficients},
                         {"limit_constraint_residual", r.limit.constraint_residual},
                         {"equivalent_minimizers", r.limit.equivalent.size()},
                         {"predictor_rhs_projection", r.predictor.rhs_projection},
                         {"predictor_residual", r.predictor.residual},
                         {"steps", steps}};
  man["status"] = any_skipped ? "partial" : "ok";
  man["timings"] = {{"total_s", seconds_since(t0)}};
  write_json(out / "manifest.json", man);
  return kExitOk;
}

int cmd_symmetry(const RunConfig& cfg, const fs::path& out, const std::string& raw, std::ostream* log) {
  const auto t0 = Clock::now();
  if (cfg.symmetry_field.empty()) throw ConfigError("symmetry: no field CSV given (symmetry.field)");
  const Problem pb = build_problem(cfg);
  std::string text;
  Field u;
  try {
    text = read_file(cfg.symmetry_field);
    std::istringstream is(text);
    u = read_csv(is, pb.grid);
  } catch (const IoError& e) {
    throw ConfigError(std::string("symmetry.field: ") + e.what());
  }
  json man = manifest_base(cfg, Command::Symmetry, {{"config_file", raw}, {"field", text}});
  man["grid"] = grid_json(pb);
  const SymmetryPair sp = classify_solution(pb, u, cfg.symmetry_threshold);
  const json sj = symmetry_json(sp);
  say(log, "symmetry: " + sp.invariant.summary());
  write_json(out / "symmetry.json", sj);
  man["symmetry"] = sj;
  man["status"] = "ok";
  man["timings"] = {{"total_s", seconds_since(t0)}};
  write_json(out / "manifest.json", man);
  return kExitOk;
}

json solve_manifest(const RunConfig& cfg, const Problem& pb, const SolveOutcome& o,
                    const std::string& raw) {
  json man = manifest_base(cfg, Command::Solve, {{"config_file", raw}});
  man["grid"] = grid_json(pb);
  man["lambda"] = o.lambda;
  man["assumptions"] = assumptions_json(o.assumptions);
  json sols = json::object();
  json times = {{"total_s", o.seconds}};
  bool ok = true;
  for (const auto& s : o.solutions) {
    json e = {{"status", s.ok ? "ok" : "failed"}};
    if (s.ok) {
      e["result"] = solve_result_json(s.result);
      e["symmetry"] = symmetry_json(s.symmetry);
    } else {
      e["error"] = {{"class", s.error_class}, {"message", s.error_message}};
    }
    ok = ok && s.ok;
    sols[s.label] = e;
    times[s.label + "_s"] = s.seconds;
  }
  man["solutions"] = sols;
  man["status"] = ok ? "ok" : "failed";
  man["timings"] = times;
  return man;
}

ReproduceRow make_row(const Preset& p, const SolutionReport& s, const ReferenceValues& ref) {
  ReproduceRow row;
  row.preset = p.name;
  row.solution = s.label;
  row.reference = ref;
  row.ok = s.ok;
  row.seconds = s.seconds;
  if (!s.ok) {
    row.error = s.error_class + ": " + s.error_message;
    return row;
  }
  double mx = s.result.max, mn = s.result.min;
  // Solutions come in +- pairs; compare the one whose extrema match.
  auto cost = [&](double a, double b) {
    double c = 0.0;
    if (ref.max) c += std::fabs(a - *ref.max) / std::fabs(*ref.max);
    if (ref.min) c += std::fabs(b - *ref.min) / std::fabs(*ref.min);
    return c;
  };
  if (cost(-mn, -mx) < cost(mx, mn)) {
    row.sign_flipped = true;
    std::swap(mx, mn);
    mx = -mx;
    mn = -mn;
  }
  row.max = mx;
  row.min = mn;
  row.energy = s.result.energy;
  row.morse_index = s.result.morse_index;
  row.symmetry = s.symmetry.invariant.summary();
  row.lattice_symmetry = s.symmetry.lattice.summary();
  row.iterations = s.result.iterations;
  row.restarts = s.result.restarts;
  return row;
}

std::vector<ReproduceRow> run_preset(const Preset& p, const RunConfig& base, const fs::path& dir,
                                     std::ostream* log) {
  RunConfig cfg = p.config;
  cfg.resolution = base.resolution;
  std::vector<ReproduceRow> rows;
  try {
    const SolveOutcome o = solve_and_write(cfg, dir / p.name, true, true, log);
    for (const auto& s : o.solutions)
      rows.push_back(make_row(p, s, s.label == "gs" ? p.gs : p.lens));
  } catch (const Error& e) {
    for (const char* label : {"gs", "lens"}) {
      ReproduceRow r;
      r.preset = p.name;
      r.solution = label;
      r.reference = std::string(label) == "gs" ? p.gs : p.lens;
      r.error = e.kind() + ": " + e.what();
      rows.push_back(r);
    }
  }
  return rows;
}

int cmd_reproduce(const RunConfig& cfg, const fs::path& out, const std::string& raw, std::ostream* log) {
  const auto t0 = Clock::now();
  const auto rows = reproduce(cfg, out, log);
  json man = manifest_base(cfg, Command::Reproduce, {{"config_file", raw}});
  json jr = json::array();
  bool ok = true;
  for (const auto& r : rows) {
    ok = ok && r.ok;
    json e = {{"preset", r.preset}, {"solution", r.solution}, {"status", r.ok ? "ok" : "FAILED"}};
    if (r.ok) {
      e["max"] = r.max;
      e["min"] = r.min;
      e["energy"] = r.energy;
      e["morse_index"] = r.morse_index;
      e["sign_flipped"] = r.sign_flipped;
      e["symmetry"] = r.symmetry;
      e["energy_deviation_percent"] = deviation_percent(r.energy, r.reference.energy);
    } else {
      e["error"] = r.error;
    }
    e["seconds"] = r.seconds;
    jr.push_back(e);
  }
  man["rows"] = jr;
  man["status"] = ok ? "ok" : "failed";
  man["timings"] = {{"total_s", seconds_since(t0)}};
  write_json(out / "manifest.json", man);
  return ok ? kExitOk : kExitSolverFailure;
}

}  // namespace

// ---------------------------------------------------------------------------

Problem build_problem(const RunConfig& cfg) {
  GridPtr grid = Grid::build(cfg.domain, cfg.resolution);
  SampledField v = sample(expr::parse(cfg.potential), grid, cfg.solver.sampling);
  Operator op = Operator::assemble(v.field);
  return Problem{grid, std::move(v.field), std::move(v.substitutions), std::move(op)};
}

SymmetryPair classify_solution(const Problem& pb, const Field& u, double threshold) {
  SymmetryPair sp;
  sp.invariant = classify_all(pb.op, u, applicable_transforms(pb.grid, pb.potential), threshold);
  std::vector<SymmetryTransform> all;
  for (TransformKind k : kAllTransforms) {
    try {
      all.push_back(make_transform(pb.grid, k));
    } catch (const NonConforming&) {
    }
  }
  sp.lattice = classify_all(pb.op, u, all, threshold);
  return sp;
}

SolveOutcome solve_and_write(const RunConfig& cfg, const fs::path& dir, bool want_gs,
                             bool want_lens, std::ostream* log, const std::string& raw_config) {
  const auto t0 = Clock::now();
  const Problem pb = build_problem(cfg);
  SolveOutcome o;
  o.assumptions = check_assumptions(pb.op);
  if (!o.assumptions.positive_definite)
    throw NotPositiveDefinite("-Laplace + V is not positive definite on this grid (smallest eigenvalue " +
                              fmt("%.6g", o.assumptions.smallest_eigenvalue) + ")");
  o.lambda = resolve_lambda(cfg, pb);
  const std::string tag = cfg.name.empty() ? std::string("run") : cfg.name;

  auto one = [&](BranchMode branch) {
    SolutionReport s;
    s.label = branch == BranchMode::GroundState ? "gs" : "lens";
    const auto t1 = Clock::now();
    try {
      const SolveConfig sc = make_solve_config(cfg, o.lambda, branch);
      if (sc.seed.empty()) throw ConfigError("no starting function for " + s.label + " (seed_" + s.label + ")");
      s.result = branch == BranchMode::GroundState ? ground_state(pb.op, sc) : least_energy_nodal(pb.op, sc);
      s.ok = true;
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      s.error_class = e.kind();
      s.error_message = e.what();
    }
    s.seconds = seconds_since(t1);
    if (s.ok) {
      s.symmetry = classify_solution(pb, s.result.u, cfg.symmetry_threshold);
      write_field(dir / ("field_" + s.label + ".csv"), s.result.u);
      write_contours(dir, s.label, s.result.u,
                     branch == BranchMode::GroundState ? cfg.levels_gs : cfg.levels_lens,
                     tag + " " + s.label);
      say(log, tag + " " + s.label + ": E = " + fmt("%.6g", s.result.energy) + "  max = " +
                   fmt("%.6g", s.result.max) + "  min = " + fmt("%.6g", s.result.min) +
                   "  morse = " + std::to_string(s.result.morse_index) + "  (" +
                   fmt("%.1f", s.seconds) + " s)");
    } else {
      say(log, tag + " " + s.label + ": FAILED " + s.error_class + ": " + s.error_message);
    }
    o.solutions.push_back(std::move(s));
  };
  if (want_gs) one(BranchMode::GroundState);
  if (want_lens) one(BranchMode::Nodal);

  json sym = json::object();
  for (const auto& s : o.solutions)
    if (s.ok) sym[s.label] = symmetry_json(s.symmetry);
  write_json(dir / "symmetry.json", sym);
  o.seconds = seconds_since(t0);
  write_json(dir / "manifest.json", solve_manifest(cfg, pb, o, raw_config.empty() ? canonical_json(cfg) : raw_config));
  return o;
}

double deviation_percent(double computed, double reference) {
  return 100.0 * (computed - reference) / std::fabs(reference);
}

std::vector<ReproduceRow> reproduce(const RunConfig& base, const fs::path& dir, std::ostream* log) {
  std::vector<const Preset*> chosen;
  if (base.reproduce_presets.empty()) {
    for (const auto& p : presets()) chosen.push_back(&p);
  } else {
    for (const auto& n : base.reproduce_presets) {
      const Preset* p = find_preset(n);
      if (!p) throw ConfigError("reproduce.presets: unknown preset '" + n + "'");
      chosen.push_back(p);
    }
  }

  std::vector<std::vector<ReproduceRow>> parts(chosen.size());
  if (base.jobs <= 1) {
    for (std::size_t i = 0; i < chosen.size(); ++i) parts[i] = run_preset(*chosen[i], base, dir, log);
  } else {
    // Each preset logs into its own buffer; buffers are flushed in order.
    std::vector<std::ostringstream> bufs(chosen.size());
    std::size_t next = 0;
    while (next < chosen.size()) {
      std::vector<std::future<std::vector<ReproduceRow>>> batch;
      const std::size_t first = next;
      for (; next < chosen.size() && next - first < static_cast<std::size_t>(base.jobs); ++next)
        batch.push_back(std::async(std::launch::async, [&, next] {
          return run_preset(*chosen[next], base, dir, log ? &bufs[next] : nullptr);
        }));
      for (std::size_t k = 0; k < batch.size(); ++k) {
        parts[first + k] = batch[k].get();
        if (log) *log << bufs[first + k].str() << std::flush;
      }
    }
  }
  std::vector<ReproduceRow> rows;
  for (auto& p : parts)
    for (auto& r : p) rows.push_back(std::move(r));
  write_file_atomic(dir / "reproduce_table.csv", reproduce_table_csv(rows));
  return rows;
}

std::string reproduce_table_csv(const std::vector<ReproduceRow>& rows) {
  std::ostringstream os;
  os << "preset,solution,status,max,ref_max,max_dev_pct,min,ref_min,min_dev_pct,energy,"
        "ref_energy,energy_dev_pct,sign_flipped,morse_index,symmetry,lattice_symmetry,"
        "iterations,restarts,seconds,error\n";
  auto num = [](double v) { return fmt("%.6g", v); };
  auto pct = [](double v) { return fmt("%.2f", v); };
  for (const auto& r : rows) {
    os << r.preset << ',' << r.solution << ',' << (r.ok ? "ok" : "FAILED") << ',';
    if (r.ok) {
      os << num(r.max) << ',';
      os << (r.reference.max ? num(*r.reference.max) + ',' + pct(deviation_percent(r.max, *r.reference.max)) : ",") << ',';
      os << num(r.min) << ',';
      os << (r.reference.min ? num(*r.reference.min) + ',' + pct(deviation_percent(r.min, *r.reference.min)) : ",") << ',';
      os << num(r.energy) << ',' << num(r.reference.energy) << ','
         << pct(deviation_percent(r.energy, r.reference.energy)) << ',';
      os << (r.sign_flipped ? "yes" : "no") << ',' << r.morse_index << ',' << csv_quote(r.symmetry)
         << ',' << csv_quote(r.lattice_symmetry) << ',' << r.iterations << ',' << r.restarts << ',';
    } else {
      os << ",";
      os << (r.reference.max ? num(*r.reference.max) : "") << ",,,";
      os << (r.reference.min ? num(*r.reference.min) : "") << ",,,";
      os << num(r.reference.energy) << ",,,,,,,,";
    }
    os << fmt("%.1f", r.seconds) << ',' << csv_quote(r.error) << '\n';
  }
  return os.str();
}

int run(const RunOptions& opts, std::ostream& log, std::ostream& err) {
  std::ostream* lp = opts.quiet ? nullptr : &log;
  RunConfig cfg;
  std::string raw;
  fs::path out = opts.out_dir;
  try {
    try {
      raw = read_file(opts.config_file);
    } catch (const IoError& e) {
      throw ConfigError(e.what());
    }
    cfg = parse_config(raw, opts.config_file.has_parent_path() ? opts.config_file.parent_path()
                                                               : fs::path("."));
    if (opts.resolution) {
      cfg.resolution = *opts.resolution;
      validate(cfg);
    }
    if (cfg.mode) {
      const RunMode m = *cfg.mode;
      const bool solve_mode = m == RunMode::GroundState || m == RunMode::Nodal || m == RunMode::Both;
      const bool fits = opts.command == Command::Solve ? solve_mode
                        : opts.command == Command::Eigs         ? m == RunMode::Eigs
                        : opts.command == Command::Continuation ? m == RunMode::Continuation
                        : opts.command == Command::Symmetry     ? m == RunMode::Symmetry
                                                                : m == RunMode::Reproduce;
      // Presets carry a solve mode but may be used with any command.
      if (!fits && !(solve_mode && !cfg.preset.empty()))
        throw ConfigError("mode '" + to_string(m) + "' does not match command '" + to_string(opts.command) + "'");
    }
    if (out.empty()) out = cfg.output_dir.empty() ? fs::path(".") : fs::path(cfg.output_dir);
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    switch (opts.command) {
      case Command::Eigs: return cmd_eigs(cfg, out, raw, lp);
      case Command::Continuation: return cmd_continuation(cfg, out, raw, lp);
      case Command::Symmetry: return cmd_symmetry(cfg, out, raw, lp);
      case Command::Reproduce: {
        const int code = cmd_reproduce(cfg, out, raw, lp);
        if (code != kExitOk) err << "error: reproduce: at least one preset FAILED\n";
        return code;
      }
      case Command::Solve: {
        const RunMode m = cfg.mode.value_or(RunMode::Both);
        const bool gs = m != RunMode::Nodal, lens = m != RunMode::GroundState;
        const SolveOutcome o = solve_and_write(cfg, out, gs, lens, lp, raw);
        for (const auto& s : o.solutions)
          if (!s.ok) {
            err << "error: " << s.error_class << ": " << s.error_message << '\n';
            return kExitSolverFailure;
          }
        return kExitOk;
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    try {
      json man = manifest_base(cfg, opts.command, {{"config_file", raw}});
      man["status"] = "failed";
      man["error"] = {{"class", e.kind()}, {"message", e.what()}};
      write_json(out / "manifest.json", man);
    } catch (const Error&) {
    }
    return is_input_error(e) ? kExitConfigError : kExitSolverFailure;
  }
  return kExitOk;
}

}  // namespace nehari
