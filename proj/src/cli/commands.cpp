#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "io.hpp"
#include "nehari/errors.hpp"
#include "nehari/scalar.hpp"

namespace nehari::cli {
namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

// Invariant flags accumulated over every accepted iterate of a solve.
struct IterateAudit {
  long iterates = 0;
  bool energy_identity = true;
  bool norm_bounds = true;
  bool det_positive = true;
  bool max_property = true;

  void add(const NehariCheck& c) {
    ++iterates;
    energy_identity = energy_identity && c.energy_ok();
    norm_bounds = norm_bounds && c.bounds_ok();
    det_positive = det_positive && c.det_ok();
    max_property = max_property && c.max_ok();
  }
};

std::string profile_text(const RunConfig& config, const ReducedGrid& grid,
                         const std::vector<std::pair<std::string, const ReducedProfile*>>& cols,
                         const std::string& title) {
  const auto theta = grid.nodes();
  const auto q = grid.weights();
  if (config.format == Format::json) {
    json j = {{"title", title}, {"config_sha256", config_digest(config)}};
    j["theta"] = std::vector<double>(theta.begin(), theta.end());
    for (const auto& [name, p] : cols) j[name] = *p;
    j["weight"] = std::vector<double>(q.begin(), q.end());
    return j.dump(1) + "\n";
  }
  std::ostringstream s;
  s << csv_preamble(config, title)
    << "# weight: quadrature weight q_i; sum_i weight_i f(theta_i) integrates f over S^N\n"
    << "theta";
  for (const auto& col : cols) s << ',' << col.first;
  s << ",weight\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    s << fmt(theta[i]);
    for (const auto& col : cols) s << ',' << fmt((*col.second)[i]);
    s << ',' << fmt(q[i]) << '\n';
  }
  return s.str();
}

int fail_config(std::ostream& log, const std::exception& e) {
  log << "error: " << e.what() << "\n";
  return Exit::bad_config;
}

json record_json(const SweepRecord& r) {
  return {{"lambda", r.lambda},
          {"energy", r.energy},
          {"overlap", r.overlap},
          {"lambda_overlap", r.lambda_overlap},
          {"interface_theta", optional_number(r.interface_theta)},
          {"max_product", r.max_product},
          {"iters", r.iters},
          {"grad_norm", r.grad_norm},
          {"converged", r.converged},
          {"failed", r.failed},
          {"status", r.status}};
}

SweepRecord record_from(const json& j) {
  SweepRecord r;
  r.lambda = j.at("lambda").get<double>();
  r.energy = j.at("energy").get<double>();
  r.overlap = j.at("overlap").get<double>();
  r.lambda_overlap = j.at("lambda_overlap").get<double>();
  if (!j.at("interface_theta").is_null()) r.interface_theta = j.at("interface_theta").get<double>();
  r.max_product = j.at("max_product").get<double>();
  r.iters = j.at("iters").get<int>();
  r.grad_norm = j.at("grad_norm").get<double>();
  r.converged = j.at("converged").get<bool>();
  r.failed = j.at("failed").get<bool>();
  r.status = j.at("status").get<std::string>();
  return r;
}

std::string state_text(const RunConfig& config, const std::vector<SweepRecord>& records,
                       const std::optional<PairState>& warm) {
  json j = {{"config_sha256", config_digest(config)}};
  j["records"] = json::array();
  for (const auto& r : records) j["records"].push_back(record_json(r));
  if (warm)
    j["warm"] = {{"u", warm->u}, {"v", warm->v}};
  else
    j["warm"] = nullptr;
  return j.dump() + "\n";
}

// The flag marks rows after the third whose overlap exceeds the previous row's.
std::vector<bool> overlap_flags(const std::vector<SweepRecord>& rows) {
  std::vector<bool> flag(rows.size(), false);
  for (std::size_t i = 3; i < rows.size(); ++i)
    if (!rows[i].failed && !rows[i - 1].failed && rows[i].overlap > rows[i - 1].overlap)
      flag[i] = true;
  return flag;
}

std::string sweep_table(const RunConfig& config, const SweepOutcome& o, bool with_limit,
                        const std::string& title, const std::string& extra_meta) {
  const std::vector<bool> flag = overlap_flags(o.records);
  if (config.format == Format::json) {
    json rows = json::array();
    for (std::size_t i = 0; i < o.records.size(); ++i) {
      json r = record_json(o.records[i]);
      r["overlap_flag"] = static_cast<bool>(flag[i]);
      rows.push_back(r);
    }
    json j = {{"title", title}, {"config_sha256", config_digest(config)}, {"rows", rows}};
    if (with_limit && o.limit)
      j["limit"] = {{"energy", o.limit->energy},
                    {"interface_theta", optional_number(o.limit->interface_theta)},
                    {"iters", o.limit->iters},
                    {"status", o.limit->status}};
    return j.dump(1) + "\n";
  }
  std::ostringstream s;
  s << csv_preamble(config, title) << extra_meta
    << "lambda,energy,overlap,lambda_overlap,interface_theta,iters,status\n";
  auto theta = [](const std::optional<double>& t) { return t ? fmt(*t) : std::string("nan"); };
  for (std::size_t i = 0; i < o.records.size(); ++i) {
    const SweepRecord& r = o.records[i];
    std::string status = r.status;
    if (flag[i]) status += " [overlap increased]";
    for (char& ch : status)
      if (ch == ',' || ch == '\n') ch = ';';
    s << fmt(r.lambda) << ',' << fmt(r.energy) << ',' << fmt(r.overlap) << ','
      << fmt(r.lambda_overlap) << ',' << theta(r.interface_theta) << ',' << r.iters << ','
      << status << '\n';
  }
  if (with_limit && o.limit) {
    std::string status = o.limit->status;
    for (char& ch : status)
      if (ch == ',' || ch == '\n') ch = ';';
    s << "-inf," << fmt(o.limit->energy) << ",0,0," << theta(o.limit->interface_theta) << ','
      << o.limit->iters << ',' << status << '\n';
  }
  return s.str();
}

}  // namespace

int cmd_solve(const RunConfig& config, std::ostream& log) {
  try {
    config.validate(true);
  } catch (const Error& e) {
    return fail_config(log, e);
  }
  const ReducedGrid grid(config.model);
  const CouplingParams& cp = config.coupling;
  const int N = config.model.N;
  const bool single = config.solver.single_component;

  std::optional<OutputDir> out;
  try {
    out.emplace(config, "solve");
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return Exit::io_error;
  }

  IterateAudit audit;
  PairObserver observer;
  if (!single)
    observer = [&](const PairState& p, int k) {
      audit.add(check_nehari_point(p, cp, grid, config.solver.seed + static_cast<unsigned>(k)));
    };

  json summary = {{"command", "solve"}, {"config_sha256", config_digest(config)}};
  int status = Exit::ok;
  try {
    const PairState init = initial_guess(config.init, grid, config.solver.seed);
    log << "solve: N=" << N << " M=" << config.model.M << " lambda=" << fmt(cp.lambda)
        << (single ? " (single component)" : "") << "\n";
    SolveResult res = minimize_nehari(init, cp, grid, config.solver, observer);
    log << "solve: " << res.status << " after " << res.iterations
        << " iterations, energy=" << fmt(res.energy) << "\n";

    const PairIntegrals I = pair_integrals(res.pair, cp, grid);
    const double level_u = nehari_norm_bound(cp.mu1, N) / N;
    const double level_v = nehari_norm_bound(cp.mu2, N) / N;
    const double scale_u = std::max(I.grad_u, 1e-300), scale_v = std::max(I.grad_v, 1e-300);
    bool positive = true;
    for (std::size_t i = 0; i < grid.size(); ++i)
      positive = positive && res.pair.u[i] >= 0.0 && res.pair.v[i] >= 0.0;

    summary["energy"] = res.energy;
    summary["grad_norm"] = res.grad_norm;
    summary["full_grad_norm"] = res.full_grad_norm;
    summary["multipliers"] = {res.mult_f, res.mult_h};
    summary["residuals"] = {{"f", res.residuals.f_val}, {"h", res.residuals.h_val}};
    summary["iterations"] = res.iterations;
    summary["converged"] = res.converged;
    summary["status"] = res.status;
    json checks = {
        {"residual_f_small", std::fabs(res.residuals.f_val) <= 1e-8 * scale_u},
        {"positivity", !config.solver.positivity_enforced || positive},
    };
    if (single) {
      summary["reference_level"] = level_u;
      checks["energy_identity"] =
          std::fabs(res.energy - I.grad_u / N) <= 1e-8 * std::fabs(res.energy);
      checks["norm_bound"] = I.grad_u >= 0.99 * nehari_norm_bound(cp.mu1, N);
    } else {
      const NehariCheck c = check_nehari_point(res.pair, cp, grid, config.solver.seed);
      summary["reference_level"] = level_u + level_v;
      summary["overlap"] = I.coupling;
      try {
        summary["interface_theta"] = interface_locate(res.pair, grid);
      } catch (const TopologyError&) {
        summary["interface_theta"] = nullptr;
      }
      checks["residual_h_small"] = std::fabs(res.residuals.h_val) <= 1e-8 * scale_v;
      checks["energy_identity"] = c.energy_ok();
      checks["norm_bounds"] = c.bounds_ok();
      checks["det_positive"] = c.det_ok();
      checks["max_property"] = c.max_ok();
      checks["level_gap"] = res.energy > level_u + level_v;
      checks["full_gradient"] = res.full_grad_norm <= 10.0 * config.solver.grad_tol;
      summary["iterate_audit"] = {{"iterates", audit.iterates},
                                  {"energy_identity", audit.energy_identity},
                                  {"norm_bounds", audit.norm_bounds},
                                  {"det_positive", audit.det_positive},
                                  {"max_property", audit.max_property}};
    }
    summary["checks"] = checks;

    const std::string name = config.format == Format::csv ? "profile.csv" : "profile.json";
    out->write(name, profile_text(config, grid, {{"u", &res.pair.u}, {"v", &res.pair.v}},
                                  "nehari solve profile"));
    if (!res.converged) status = Exit::solver_failed;
  } catch (const CollapseError& e) {
    log << "error: " << e.what() << " (iteration " << e.iteration() << ")\n";
    summary["status"] = "collapse";
    summary["error"] = e.what();
    summary["iteration"] = e.iteration();
    summary["converged"] = false;
    status = Exit::solver_failed;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    summary["status"] = "error";
    summary["error"] = e.what();
    summary["converged"] = false;
    status = Exit::solver_failed;
  }
  try {
    out->write("summary.json", summary.dump(2) + "\n");
    out->finish();
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return Exit::io_error;
  }
  return status;
}

int cmd_sweep(const RunConfig& config, bool resume, std::ostream& log) {
  SweepSchedule schedule;
  try {
    config.validate(false);
    schedule = config.schedule();
    schedule.validate();
    if (config.solver.single_component)
      throw DomainError("config: sweep needs both components (single_component is set)");
  } catch (const Error& e) {
    return fail_config(log, e);
  }
  const ReducedGrid grid(config.model);

  std::optional<OutputDir> out;
  try {
    out.emplace(config, "sweep");
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return Exit::io_error;
  }

  std::optional<SweepResume> from;
  const auto state_path = out->path() / "sweep_state.json";
  if (resume) {
    std::ifstream in(state_path);
    if (!in) {
      log << "sweep: no saved state in " << out->path().string() << ", starting fresh\n";
    } else {
      try {
        const json j = json::parse(in);
        if (j.at("config_sha256").get<std::string>() != config_digest(config))
          throw DomainError("saved sweep state belongs to a different configuration");
        if (!j.at("warm").is_null()) {
          SweepResume r;
          for (const auto& rec : j.at("records")) r.records.push_back(record_from(rec));
          r.warm.u = j.at("warm").at("u").get<std::vector<double>>();
          r.warm.v = j.at("warm").at("v").get<std::vector<double>>();
          from = std::move(r);
          log << "sweep: resuming after " << from->records.size() << " records\n";
        }
      } catch (const Error& e) {
        return fail_config(log, e);
      } catch (const json::exception& e) {
        log << "error: unreadable sweep state: " << e.what() << "\n";
        return Exit::bad_config;
      }
    }
  }

  std::vector<SweepRecord> done = from ? from->records : std::vector<SweepRecord>{};
  SweepHooks hooks;
  hooks.on_record = [&](const SweepRecord& r, const std::optional<PairState>& warm) {
    done.push_back(r);
    log << "sweep: lambda=" << fmt(r.lambda) << " energy=" << fmt(r.energy)
        << " overlap=" << fmt(r.overlap) << " iters=" << r.iters << " " << r.status << "\n";
    out->write("sweep_state.json", state_text(config, done, warm));
  };

  SweepOutcome o;
  try {
    o = sweep_lambda(schedule, config.coupling, grid, config.solver, from, hooks);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return Exit::solver_failed;
  }
  if (o.limit)
    log << "sweep: limit problem " << o.limit->status << ", energy=" << fmt(o.limit->energy)
        << "\n";

  const bool csv = config.format == Format::csv;
  const std::string ext = csv ? ".csv" : ".json";
  out->write("sweep" + ext, sweep_table(config, o, true, "nehari sweep", ""));
  out->write("sweep_plot" + ext,
             sweep_table(config, o, false, "nehari sweep plot data",
                         "# plot data: one row per finite lambda, e.g. gnuplot\n"
                         "#   set datafile separator ','; set logscale x\n"
                         "#   plot 'sweep_plot.csv' using (-$1):2 skip 1 with linespoints\n"));
  if (o.limit && !o.limit->w.empty())
    out->write("limit_profile" + ext,
               profile_text(config, grid, {{"w", &o.limit->w}}, "nehari limit profile"));

  const std::size_t ok_rows =
      std::count_if(o.records.begin(), o.records.end(), [](const auto& r) { return !r.failed; });
  json summary = {{"command", "sweep"}, {"config_sha256", config_digest(config)}};
  summary["rows"] = o.records.size();
  summary["successful_rows"] = ok_rows;
  if (!o.records.empty() && !o.records.front().failed && !o.records.back().failed) {
    double max_lo = 0.0;
    for (const auto& r : o.records)
      if (!r.failed) max_lo = std::max(max_lo, r.lambda_overlap);
    summary["overlap_drop"] = o.records.front().overlap / o.records.back().overlap;
    summary["lambda_overlap_ratio"] = o.records.back().lambda_overlap / max_lo;
  }
  bool monotone = true;
  for (std::size_t i = 1; i < o.records.size(); ++i)
    if (!o.records[i].failed && !o.records[i - 1].failed &&
        o.records[i].energy < o.records[i - 1].energy * (1.0 - 1e-6))
      monotone = false;
  summary["findings"] = {{"energy_nondecreasing", monotone}};
  if (o.limit) {
    summary["limit"] = {{"energy", o.limit->energy},
                        {"grad_norm", o.limit->grad_norm},
                        {"iters", o.limit->iters},
                        {"converged", o.limit->converged},
                        {"interface_theta", optional_number(o.limit->interface_theta)},
                        {"status", o.limit->status}};
    if (!o.records.empty() && !o.records.back().failed)
      summary["final_gap"] =
          std::fabs(o.records.back().energy - o.limit->energy) / o.limit->energy;
    if (!o.limit->w.empty()) {
      const ToriReport t = verify_tori(o.limit->w, grid);
      summary["tori"] = {{"pass", t.pass()},
                         {"crossings", t.crossings},
                         {"theta0", optional_number(t.theta0)},
                         {"touches_zero", t.touches_zero}};
    }
  }
  try {
    out->write("summary.json", summary.dump(2) + "\n");
    out->finish();
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return Exit::io_error;
  }
  return ok_rows > 0 ? Exit::ok : Exit::solver_failed;
}

int cmd_sync_threshold(const RunConfig& config, std::ostream& out, std::ostream& log) {
  const CouplingParams& cp = config.coupling;
  const int N = config.model.N;
  try {
    CouplingParams probe = cp;
    probe.lambda = -1.0;
    probe.validate(N, true);
  } catch (const Error& e) {
    return fail_config(log, e);
  }
  json j = {{"command", "sync-threshold"},
            {"mu1", cp.mu1},
            {"mu2", cp.mu2},
            {"alpha", cp.alpha},
            {"beta", cp.beta},
            {"N", N}};
  int status = Exit::ok;
  try {
    const ThresholdBracket b = sync_threshold(cp.mu1, cp.mu2, cp.alpha, cp.beta, N);
    const double ls = b.lambda_star();
    SyncOptions par;
    par.exec = Exec::parallel;
    j["lower"] = b.lower;
    j["upper"] = b.upper;
    j["lambda_star"] = ls;
    j["brute_cells_above"] = sync_brute_scan({cp.mu1, cp.mu2, cp.alpha, cp.beta, ls + 1e-2, N},
                                             1000, par);
    j["brute_cells_below"] =
        ls - 1e-2 < 0.0
            ? sync_brute_scan({cp.mu1, cp.mu2, cp.alpha, cp.beta, ls - 1e-2, N}, 1000, par)
            : 0;
    if (cp.mu1 == cp.mu2 && cp.alpha == cp.beta)
      j["diagonal_threshold"] = -cp.mu1 / cp.alpha;
  } catch (const BracketError& e) {
    log << "error: " << e.what() << "\n";
    j["error"] = e.what();
    status = Exit::solver_failed;
  }
  out << j.dump(2) << "\n";
  try {
    OutputDir dir(config, "sync-threshold");
    dir.write("sync_threshold.json", j.dump(2) + "\n");
    dir.finish();
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return Exit::io_error;
  }
  return status;
}

int cmd_sobolev(int N, std::ostream& out) {
  if (N < 3) {
    out << "error: sobolev constant needs N >= 3\n";
    return Exit::bad_config;
  }
  const double S = sobolev_constant(N), Ss = sobolev_constant_sphere(N);
  const double SN = std::pow(S, N / 2.0);
  json j = {{"N", N},
            {"S", S},
            {"S_sphere_formula", Ss},
            {"relative_difference", std::fabs(S - Ss) / S},
            {"sphere_area", sphere_area(N)},
            {"single_level", SN / N},
            {"pair_level", 2.0 * SN / N}};
  out << j.dump(2) << "\n";
  return Exit::ok;
}

}  // namespace nehari::cli
