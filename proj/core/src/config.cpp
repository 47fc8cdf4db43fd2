#include "nehari/config.hpp"

#include "json.hpp"

#include <cmath>
#include <initializer_list>
#include <set>

#include "nehari/errors.hpp"
#include "nehari/expr.hpp"
#include "nehari/io.hpp"
#include "nehari/presets.hpp"

namespace nehari {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::GroundState: return "gs";
    case RunMode::Nodal: return "lens";
    case RunMode::Both: return "both";
    case RunMode::Eigs: return "eigs";
    case RunMode::Continuation: return "continuation";
    case RunMode::Symmetry: return "symmetry";
    case RunMode::Reproduce: return "reproduce";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(where, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) fail(where, "unknown key '" + k + "'");
}

double get_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where, "expected a finite number");
  return d;
}

int get_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

bool get_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) fail(where, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_numbers(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::pair<double, double> get_pair(const json& v, const std::string& where) {
  const auto xs = get_numbers(v, where);
  if (xs.size() != 2) fail(where, "expected two numbers");
  return {xs[0], xs[1]};
}

Domain parse_domain(const json& d) {
  if (!d.is_object() || !d.contains("type")) fail("domain", "expected an object with a 'type'");
  const std::string type = get_string(d["type"], "domain.type");
  if (type == "rectangle") {
    allow_keys(d, "domain", {"type", "x", "y"});
    if (!d.contains("x") || !d.contains("y")) fail("domain", "rectangle needs 'x' and 'y' ranges");
    const auto [x0, x1] = get_pair(d["x"], "domain.x");
    const auto [y0, y1] = get_pair(d["y"], "domain.y");
    return Rectangle{x0, x1, y0, y1};
  }
  if (type == "disk") {
    allow_keys(d, "domain", {"type", "center", "radius"});
    if (!d.contains("radius")) fail("domain", "disk needs a 'radius'");
    std::pair<double, double> c{0.0, 0.0};
    if (d.contains("center")) c = get_pair(d["center"], "domain.center");
    return Disk{c.first, c.second, get_number(d["radius"], "domain.radius")};
  }
  fail("domain.type", "expected 'rectangle' or 'disk', got '" + type + "'");
}

LambdaSpec parse_lambda(const json& v) {
  LambdaSpec s;
  if (v.is_string()) {
    const std::string t = v.get<std::string>();
    if (t == "auto:lambda1") s.kind = LambdaSpec::Kind::Lambda1;
    else if (t == "auto:lambda2") s.kind = LambdaSpec::Kind::Lambda2;
    else fail("lambda", "expected a number, 'auto:lambda1' or 'auto:lambda2'");
    return s;
  }
  s.value = get_number(v, "lambda");
  return s;
}

RunMode parse_mode(const std::string& m) {
  for (RunMode r : {RunMode::GroundState, RunMode::Nodal, RunMode::Both, RunMode::Eigs,
                    RunMode::Continuation, RunMode::Symmetry, RunMode::Reproduce})
    if (to_string(r) == m) return r;
  fail("mode", "unknown mode '" + m + "'");
}

BranchMode parse_branch(const std::string& b, const std::string& where) {
  if (b == "gs") return BranchMode::GroundState;
  if (b == "lens") return BranchMode::Nodal;
  fail(where, "expected 'gs' or 'lens'");
}

void apply_solver(SolverSettings& s, const json& j) {
  allow_keys(j, "solver", {"method", "max_iter", "memory", "step0", "shrink", "armijo",
                           "nodal_scaling", "morse_check", "morse_k", "max_restarts",
                           "singular_rule", "subcells", "offset_factor"});
  for (const auto& [k, v] : j.items()) {
    const std::string w = "solver." + k;
    if (k == "method") {
      const auto m = get_string(v, w);
      if (m == "lbfgs") s.method = DescentMethod::Lbfgs;
      else if (m == "steepest") s.method = DescentMethod::Steepest;
      else fail(w, "expected 'lbfgs' or 'steepest'");
    } else if (k == "max_iter") s.max_iter = get_int(v, w);
    else if (k == "memory") s.memory = get_int(v, w);
    else if (k == "step0") s.step0 = get_number(v, w);
    else if (k == "shrink") s.shrink = get_number(v, w);
    else if (k == "armijo") s.armijo = get_number(v, w);
    else if (k == "nodal_scaling") {
      const auto m = get_string(v, w);
      if (m == "coupled") s.nodal_scaling = NodalScaling::Coupled;
      else if (m == "independent") s.nodal_scaling = NodalScaling::Independent;
      else fail(w, "expected 'coupled' or 'independent'");
    } else if (k == "morse_check") s.morse_check = get_bool(v, w);
    else if (k == "morse_k") s.morse_k = get_int(v, w);
    else if (k == "max_restarts") s.max_restarts = get_int(v, w);
    else if (k == "singular_rule") {
      const auto m = get_string(v, w);
      if (m == "cell-average") s.sampling.rule = SingularRule::CellAverage;
      else if (m == "offset") s.sampling.rule = SingularRule::Offset;
      else fail(w, "expected 'cell-average' or 'offset'");
    } else if (k == "subcells") s.sampling.subcells = get_int(v, w);
    else if (k == "offset_factor") s.sampling.offset_factor = get_number(v, w);
  }
}

void apply_document(RunConfig& c, const json& doc, const fs::path& base_dir) {
  allow_keys(doc, "config",
             {"name", "preset", "domain", "potential", "lambda", "p", "mode", "seed", "seed_gs",
              "seed_lens", "resolution", "tolerances", "solver", "eigs", "continuation", "symmetry",
              "contours", "reproduce", "output_dir"});
  for (const auto& [k, v] : doc.items()) {
    if (k == "preset") continue;
    if (k == "name") c.name = get_string(v, k);
    else if (k == "domain") c.domain = parse_domain(v);
    else if (k == "potential") c.potential = get_string(v, k);
    else if (k == "lambda") c.lambda = parse_lambda(v);
    else if (k == "p") c.p = get_number(v, k);
    else if (k == "mode") c.mode = parse_mode(get_string(v, k));
    else if (k == "seed") c.seed_gs = c.seed_lens = get_string(v, k);
    else if (k == "resolution") c.resolution = get_int(v, k);
    else if (k == "output_dir") c.output_dir = get_string(v, k);
    else if (k == "solver") apply_solver(c.solver, v);
    else if (k == "tolerances") {
      allow_keys(v, k, {"gradient", "eigen", "symmetry"});
      if (v.contains("gradient")) c.grad_tol = get_number(v["gradient"], "tolerances.gradient");
      if (v.contains("eigen")) c.eig_tol = get_number(v["eigen"], "tolerances.eigen");
      if (v.contains("symmetry")) c.symmetry_threshold = get_number(v["symmetry"], "tolerances.symmetry");
    } else if (k == "eigs") {
      allow_keys(v, k, {"k"});
      if (v.contains("k")) c.eig_k = get_int(v["k"], "eigs.k");
    } else if (k == "continuation") {
      allow_keys(v, k, {"branch", "p_list", "lambda_factor", "lambda", "predictor"});
      auto& s = c.continuation;
      if (v.contains("branch")) s.branch = parse_branch(get_string(v["branch"], "continuation.branch"), "continuation.branch");
      if (v.contains("p_list")) s.p_list = get_numbers(v["p_list"], "continuation.p_list");
      if (v.contains("lambda_factor")) s.lambda_factor = get_number(v["lambda_factor"], "continuation.lambda_factor");
      if (v.contains("lambda")) s.lambda = get_number(v["lambda"], "continuation.lambda");
      if (v.contains("predictor")) s.predictor = get_bool(v["predictor"], "continuation.predictor");
    } else if (k == "symmetry") {
      allow_keys(v, k, {"field"});
      if (v.contains("field")) {
        fs::path f = get_string(v["field"], "symmetry.field");
        if (f.is_relative()) f = base_dir / f;
        c.symmetry_field = f.lexically_normal().string();
      }
    } else if (k == "contours") {
      allow_keys(v, k, {"gs", "lens"});
      if (v.contains("gs")) c.levels_gs = get_numbers(v["gs"], "contours.gs");
      if (v.contains("lens")) c.levels_lens = get_numbers(v["lens"], "contours.lens");
    } else if (k == "reproduce") {
      allow_keys(v, k, {"presets", "jobs"});
      if (v.contains("presets")) {
        if (!v["presets"].is_array()) fail("reproduce.presets", "expected an array of preset names");
        c.reproduce_presets.clear();
        for (const auto& n : v["presets"]) c.reproduce_presets.push_back(get_string(n, "reproduce.presets"));
      }
      if (v.contains("jobs")) c.jobs = get_int(v["jobs"], "reproduce.jobs");
    }
  }
  // Specific seeds win over "seed" whatever their order in the document.
  if (doc.contains("seed_gs")) c.seed_gs = get_string(doc["seed_gs"], "seed_gs");
  if (doc.contains("seed_lens")) c.seed_lens = get_string(doc["seed_lens"], "seed_lens");
}

void check_expression(const std::string& text, const std::string& where) {
  try {
    (void)expr::parse(text);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

json domain_json(const Domain& d) {
  if (const auto* r = std::get_if<Rectangle>(&d))
    return {{"type", "rectangle"}, {"x", {r->x0, r->x1}}, {"y", {r->y0, r->y1}}};
  const auto& k = std::get<Disk>(d);
  return {{"type", "disk"}, {"center", {k.cx, k.cy}}, {"radius", k.radius}};
}

}  // namespace

void validate(const RunConfig& c) {
  if (!(c.p > 2.0)) fail("p", "must be greater than 2");
  if (c.lambda.kind == LambdaSpec::Kind::Value && !(c.lambda.value > 0.0))
    fail("lambda", "must be positive");
  if (c.resolution < 2) fail("resolution", "must be at least 2");
  if (const auto* r = std::get_if<Rectangle>(&c.domain)) {
    if (!(r->x0 < r->x1) || !(r->y0 < r->y1)) fail("domain", "rectangle ranges must be increasing");
  } else if (!(std::get<Disk>(c.domain).radius > 0.0)) {
    fail("domain.radius", "must be positive");
  }
  check_expression(c.potential, "potential");
  if (!c.seed_gs.empty()) check_expression(c.seed_gs, "seed_gs");
  if (!c.seed_lens.empty()) check_expression(c.seed_lens, "seed_lens");
  if (!(c.grad_tol > 0.0)) fail("tolerances.gradient", "must be positive");
  if (!(c.eig_tol > 0.0)) fail("tolerances.eigen", "must be positive");
  if (!(c.symmetry_threshold > 0.0)) fail("tolerances.symmetry", "must be positive");
  const auto& s = c.solver;
  if (s.max_iter < 1) fail("solver.max_iter", "must be positive");
  if (s.memory < 1) fail("solver.memory", "must be positive");
  if (!(s.step0 > 0.0)) fail("solver.step0", "must be positive");
  if (!(s.shrink > 0.0 && s.shrink < 1.0)) fail("solver.shrink", "must lie in (0,1)");
  if (!(s.armijo > 0.0 && s.armijo < 0.5)) fail("solver.armijo", "must lie in (0,1/2)");
  if (s.morse_k < 1) fail("solver.morse_k", "must be positive");
  if (s.max_restarts < 0) fail("solver.max_restarts", "must be non-negative");
  if (s.sampling.subcells < 2) fail("solver.subcells", "must be at least 2");
  if (c.eig_k < 1) fail("eigs.k", "must be positive");
  const auto& ct = c.continuation;
  if (ct.p_list.empty()) fail("continuation.p_list", "must not be empty");
  for (std::size_t i = 0; i < ct.p_list.size(); ++i) {
    if (!(ct.p_list[i] > 2.0)) fail("continuation.p_list", "exponents must exceed 2");
    if (i > 0 && !(ct.p_list[i] < ct.p_list[i - 1]))
      fail("continuation.p_list", "exponents must decrease strictly");
  }
  if (!(ct.lambda_factor > 0.0)) fail("continuation.lambda_factor", "must be positive");
  if (ct.lambda < 0.0) fail("continuation.lambda", "must be non-negative");
  for (const auto& n : c.reproduce_presets)
    if (!find_preset(n)) fail("reproduce.presets", "unknown preset '" + n + "'");
  if (c.jobs < 1) fail("reproduce.jobs", "must be positive");
}

RunConfig parse_config(std::string_view text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  RunConfig c;
  if (doc.contains("preset")) {
    const std::string name = get_string(doc["preset"], "preset");
    const Preset* p = find_preset(name);
    if (!p) fail("preset", "unknown preset '" + name + "'");
    c = p->config;
    c.preset = name;
  }
  apply_document(c, doc, base_dir);
  validate(c);
  return c;
}

RunConfig load_config(const fs::path& file) {
  std::string text;
  try {
    text = read_file(file);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, file.has_parent_path() ? file.parent_path() : fs::path("."));
}

std::string canonical_json(const RunConfig& c) {
  const auto& s = c.solver;
  json lambda;
  switch (c.lambda.kind) {
    case LambdaSpec::Kind::Value: lambda = c.lambda.value; break;
    case LambdaSpec::Kind::Lambda1: lambda = "auto:lambda1"; break;
    case LambdaSpec::Kind::Lambda2: lambda = "auto:lambda2"; break;
  }
  json j = {
      {"name", c.name},
      {"preset", c.preset},
      {"domain", domain_json(c.domain)},
      {"potential", c.potential},
      {"lambda", lambda},
      {"p", c.p},
      {"mode", c.mode ? json(to_string(*c.mode)) : json(nullptr)},
      {"seed_gs", c.seed_gs},
      {"seed_lens", c.seed_lens},
      {"resolution", c.resolution},
      {"tolerances", {{"gradient", c.grad_tol}, {"eigen", c.eig_tol}, {"symmetry", c.symmetry_threshold}}},
      {"solver",
       {{"method", s.method == DescentMethod::Lbfgs ? "lbfgs" : "steepest"},
        {"max_iter", s.max_iter},
        {"memory", s.memory},
        {"step0", s.step0},
        {"shrink", s.shrink},
        {"armijo", s.armijo},
        {"nodal_scaling", s.nodal_scaling == NodalScaling::Coupled ? "coupled" : "independent"},
        {"morse_check", s.morse_check},
        {"morse_k", s.morse_k},
        {"max_restarts", s.max_restarts},
        {"singular_rule", s.sampling.rule == SingularRule::CellAverage ? "cell-average" : "offset"},
        {"subcells", s.sampling.subcells},
        {"offset_factor", s.sampling.offset_factor}}},
      {"eigs", {{"k", c.eig_k}}},
      {"continuation",
       {{"branch", c.continuation.branch == BranchMode::GroundState ? "gs" : "lens"},
        {"p_list", c.continuation.p_list},
        {"lambda_factor", c.continuation.lambda_factor},
        {"lambda", c.continuation.lambda},
        {"predictor", c.continuation.predictor}}},
      {"symmetry", {{"field", c.symmetry_field}}},
      {"contours", {{"gs", c.levels_gs}, {"lens", c.levels_lens}}},
      {"reproduce", {{"presets", c.reproduce_presets}, {"jobs", c.jobs}}},
      {"output_dir", c.output_dir},
  };
  return j.dump();
}

SolveConfig make_solve_config(const RunConfig& c, double lambda, BranchMode branch) {
  SolveConfig s;
  s.params = {c.p, lambda};
  const std::string& seed = branch == BranchMode::GroundState ? c.seed_gs : c.seed_lens;
  if (!seed.empty()) s.seed = expr::parse(seed);
  s.step0 = c.solver.step0;
  s.shrink = c.solver.shrink;
  s.armijo = c.solver.armijo;
  s.grad_tol = c.grad_tol;
  s.max_iter = c.solver.max_iter;
  s.method = c.solver.method;
  s.memory = c.solver.memory;
  s.nodal_scaling = c.solver.nodal_scaling;
  s.sampling = c.solver.sampling;
  s.morse_check = c.solver.morse_check;
  s.morse_k = c.solver.morse_k;
  s.max_restarts = c.solver.max_restarts;
  return s;
}

}  // namespace nehari
