#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "io.hpp"
#include "nehari/errors.hpp"

namespace nehari::cli {
namespace {

using nlohmann::json;

std::string num(double x) { return fmt(x); }

std::string num(int x) { return std::to_string(x); }

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> known) {
  const std::set<std::string> k(known.begin(), known.end());
  for (const auto& [key, _] : obj.items())
    if (!k.count(key)) throw DomainError("config: unknown key '" + where + "." + key + "'");
}

const std::string& text(const json& v, const std::string& key) {
  if (!v.is_string())
    throw DomainError("config: '" + key + "' must be a decimal string");
  return v.get_ref<const std::string&>();
}

double get_real(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const std::string full = where + "." + key;
  const std::string& s = text(obj.at(key), full);
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw DomainError("config: '" + full + "' is not a number: \"" + s + "\"");
  return x;
}

long long get_int(const json& obj, const std::string& where, const char* key, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const std::string full = where + "." + key;
  const std::string& s = text(obj.at(key), full);
  long long x = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw DomainError("config: '" + full + "' is not an integer: \"" + s + "\"");
  return x;
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean())
    throw DomainError("config: '" + where + "." + key + "' must be true or false");
  return obj.at(key).get<bool>();
}

const json& section(const json& root, const char* key) {
  static const json empty = json::object();
  if (!root.contains(key)) return empty;
  if (!root.at(key).is_object()) throw DomainError(std::string("config: '") + key + "' must be an object");
  return root.at(key);
}

}  // namespace

std::string to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw DomainError("config: unknown output format '" + s + "'");
}

SweepSchedule RunConfig::schedule() const {
  if (!sweep_lambdas.empty()) return SweepSchedule{sweep_lambdas};
  return SweepSchedule::geometric(sweep_first, sweep_last, sweep_count);
}

void RunConfig::validate(bool competitive) const {
  model.validate();
  coupling.validate(model.N, competitive && !solver.single_component);
  solver.validate();
  if (out_dir.empty()) throw DomainError("config: output directory is empty");
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw DomainError("config: top level must be an object");
  reject_unknown(root, "", {"model", "coupling", "solver", "sweep", "output"});

  RunConfig c;
  const json& m = section(root, "model");
  reject_unknown(m, "model", {"N", "m", "n", "M"});
  c.model.N = static_cast<int>(get_int(m, "model", "N", c.model.N));
  c.model.m = static_cast<int>(get_int(m, "model", "m", c.model.m));
  c.model.n = static_cast<int>(get_int(m, "model", "n", c.model.n));
  c.model.M = static_cast<int>(get_int(m, "model", "M", c.model.M));

  const json& cp = section(root, "coupling");
  reject_unknown(cp, "coupling", {"mu1", "mu2", "alpha", "beta", "lambda"});
  c.coupling.mu1 = get_real(cp, "coupling", "mu1", c.coupling.mu1);
  c.coupling.mu2 = get_real(cp, "coupling", "mu2", c.coupling.mu2);
  c.coupling.alpha = get_real(cp, "coupling", "alpha", c.coupling.alpha);
  c.coupling.beta = get_real(cp, "coupling", "beta", c.coupling.beta);
  c.coupling.lambda = get_real(cp, "coupling", "lambda", c.coupling.lambda);

  const json& s = section(root, "solver");
  reject_unknown(s, "solver",
                 {"max_iters", "grad_tol", "armijo_slope", "backtrack", "positivity_enforced",
                  "single_component", "multiplier_tol", "seed", "init"});
  c.solver.max_iters = static_cast<int>(get_int(s, "solver", "max_iters", c.solver.max_iters));
  c.solver.grad_tol = get_real(s, "solver", "grad_tol", c.solver.grad_tol);
  c.solver.armijo_slope = get_real(s, "solver", "armijo_slope", c.solver.armijo_slope);
  c.solver.backtrack = get_real(s, "solver", "backtrack", c.solver.backtrack);
  c.solver.positivity_enforced =
      get_bool(s, "solver", "positivity_enforced", c.solver.positivity_enforced);
  c.solver.single_component = get_bool(s, "solver", "single_component", c.solver.single_component);
  c.solver.multiplier_tol = get_real(s, "solver", "multiplier_tol", c.solver.multiplier_tol);
  const long long seed = get_int(s, "solver", "seed", 0);
  if (seed < 0) throw DomainError("config: 'solver.seed' must be >= 0");
  c.solver.seed = static_cast<std::uint64_t>(seed);
  if (s.contains("init")) c.init = parse_init_kind(text(s.at("init"), "solver.init"));

  const json& w = section(root, "sweep");
  reject_unknown(w, "sweep", {"first", "last", "count", "lambdas"});
  c.sweep_first = get_real(w, "sweep", "first", c.sweep_first);
  c.sweep_last = get_real(w, "sweep", "last", c.sweep_last);
  c.sweep_count = static_cast<int>(get_int(w, "sweep", "count", c.sweep_count));
  if (w.contains("lambdas")) {
    if (!w.at("lambdas").is_array()) throw DomainError("config: 'sweep.lambdas' must be an array");
    for (std::size_t i = 0; i < w.at("lambdas").size(); ++i) {
      const json one = {{"x", w.at("lambdas")[i]}};
      c.sweep_lambdas.push_back(get_real(one, "sweep.lambdas", "x", 0.0));
    }
  }

  const json& o = section(root, "output");
  reject_unknown(o, "output", {"dir", "format"});
  if (o.contains("dir")) c.out_dir = text(o.at("dir"), "output.dir");
  if (o.contains("format")) c.format = parse_format(text(o.at("format"), "output.format"));
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("config: cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
  json root = json::object();
  root["model"] = {{"N", num(c.model.N)}, {"m", num(c.model.m)}, {"n", num(c.model.n)},
                   {"M", num(c.model.M)}};
  root["coupling"] = {{"mu1", num(c.coupling.mu1)},
                      {"mu2", num(c.coupling.mu2)},
                      {"alpha", num(c.coupling.alpha)},
                      {"beta", num(c.coupling.beta)},
                      {"lambda", num(c.coupling.lambda)}};
  root["solver"] = {{"max_iters", num(c.solver.max_iters)},
                    {"grad_tol", num(c.solver.grad_tol)},
                    {"armijo_slope", num(c.solver.armijo_slope)},
                    {"backtrack", num(c.solver.backtrack)},
                    {"positivity_enforced", c.solver.positivity_enforced},
                    {"single_component", c.solver.single_component},
                    {"multiplier_tol", num(c.solver.multiplier_tol)},
                    {"seed", std::to_string(c.solver.seed)},
                    {"init", to_string(c.init)}};
  json sweep = {{"first", num(c.sweep_first)},
                {"last", num(c.sweep_last)},
                {"count", num(c.sweep_count)}};
  if (!c.sweep_lambdas.empty()) {
    json arr = json::array();
    for (double l : c.sweep_lambdas) arr.push_back(num(l));
    sweep["lambdas"] = arr;
  }
  root["sweep"] = sweep;
  root["output"] = {{"dir", c.out_dir}, {"format", to_string(c.format)}};
  return root.dump(2) + "\n";
}

}  // namespace nehari::cli
