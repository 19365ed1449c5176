#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "erk/dlss_chain.hpp"
#include "erk/error.hpp"

namespace erk::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) { return std::isnan(v) ? "nan" : fmt::format("{:.17g}", v); }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, fmt::format("cannot write '{}'", path.string()));
  return out;
}

void prepare_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw Error(ErrorKind::io, fmt::format("cannot create '{}': {}", cfg.out.string(), ec.message()));
  auto echo = open_out(cfg.out / "config.txt");
  for (const auto& [k, v] : cfg.echo) echo << k << '=' << v << '\n';
}

std::string entropy_row(double t, const EntropyFunctional& e, const ProblemSpec& p, const StateField& u,
                        int iters) {
  const double h = evaluate(e, u, p.grid());
  const double mass = u.values().sum() * p.grid().dx();
  return fmt::format("{},{},{},{},{},{}\n", num(t), num(h), num(mass), num(u.values().minCoeff()),
                     num(u.values().maxCoeff()), iters);
}

void write_snapshot(const fs::path& path, const ProblemSpec& p, const StateField& u) {
  auto out = open_out(path);
  out << (u.species() == 1 ? "x,u\n" : "x,u1,u2\n");
  for (int i = 0; i < u.n(); ++i) {
    out << num(p.grid().x(i));
    for (int s = 0; s < u.species(); ++s) out << ',' << num(u(s, i));
    out << '\n';
  }
}

std::string time_tag(double t) { return fmt::format("{:g}", t); }

}  // namespace

SimulateSummary cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  prepare_out(cfg);
  const ProblemSpec problem = make_problem(cfg);
  const EntropyFunctional entropy = make_entropy(cfg);
  const Scheme& scheme = builtin_schemes().lookup(cfg.scheme);
  const StateField u0 = make_initial(cfg, problem);

  auto csv = open_out(cfg.out / "entropy.csv");
  auto status = open_out(cfg.out / "status.txt");
  csv << "t,H,mass,min,max,iters\n" << entropy_row(0.0, entropy, problem, u0, 0);

  std::vector<double> pending = cfg.snapshots;
  std::sort(pending.begin(), pending.end());
  auto snap = [&](double t, const StateField& u) {
    while (!pending.empty() && pending.front() <= t + 0.5 * cfg.tau) {
      write_snapshot(cfg.out / fmt::format("snapshot_t{}.csv", time_tag(pending.front())), problem, u);
      pending.erase(pending.begin());
    }
  };
  snap(0.0, u0);

  SimulateSummary summary;
  summary.final_entropy = evaluate(entropy, u0, problem.grid());
  try {
    run(problem, scheme, u0, cfg.tau, cfg.t_end, cfg.newton,
        [&](int k, double t, const StateField& u, int iters) {
          csv << entropy_row(t, entropy, problem, u, iters);
          csv.flush();
          snap(t, u);
          summary.steps = k;
          summary.final_entropy = evaluate(entropy, u, problem.grid());
        });
  } catch (const Error& e) {
    status << "failed after " << summary.steps << " steps: " << to_string(e.kind()) << ": " << e.what()
           << '\n';
    throw;
  }
  status << "ok " << summary.steps << " steps\n";
  log << fmt::format("simulate: {} steps with {}, H={}\n", summary.steps, scheme.name(),
                     num(summary.final_entropy));
  return summary;
}

int cmd_gprofile(const RunConfig& cfg, std::ostream& log) {
  prepare_out(cfg);
  const ProblemSpec problem = make_problem(cfg);
  const EntropyFunctional entropy = make_entropy(cfg);
  const Scheme& base_scheme = builtin_schemes().lookup(cfg.scheme);
  std::vector<double> times = cfg.base_times;
  std::sort(times.begin(), times.end());

  StateField u = make_initial(cfg, problem);
  double t = 0.0;
  int files = 0;
  for (double base : times) {
    if (base > t) {
      const Trajectory traj = run(problem, base_scheme, u, cfg.tau, base - t, cfg.newton);
      u = traj.states.back();
      t = traj.times.back() + t;
    }
    for (const auto& name : cfg.profile_schemes) {
      const Scheme& s = builtin_schemes().lookup(name);
      const GProfile prof = profile_g(entropy, problem, s, u, cfg.tau_max, cfg.m, cfg.newton,
                                      cfg.q_exponent, t);
      auto out = open_out(cfg.out / fmt::format("gprofile_{}_t{}.csv", name, time_tag(base)));
      write_csv(out, prof);
      ++files;
      if (prof.failure_index)
        log << fmt::format("gprofile: {} at t={}: stopped at tau index {}: {}\n", name, time_tag(base),
                           *prof.failure_index, prof.failure_message);
    }
  }
  log << fmt::format("gprofile: wrote {} profiles\n", files);
  return files;
}

int cmd_region(const RunConfig& cfg, std::ostream& log) {
  prepare_out(cfg);
  const RegionFamily family = cfg.region_family == "pme1" ? RegionFamily::pme1 : RegionFamily::pme0;
  const RegionMask mask = emit_mask(family, cfg.alpha_range, cfg.beta_range, cfg.d, cfg.c_rk);
  auto out = open_out(cfg.out / fmt::format("region_{}_d{}_c{:g}.csv", cfg.region_family, cfg.d, cfg.c_rk));
  write_csv(out, mask);
  int members = 0;
  for (const auto& row : mask.member) members += static_cast<int>(std::count(row.begin(), row.end(), true));
  log << fmt::format("region {}: {} of {} cells are members\n", cfg.region_family, members,
                     mask.alphas.size() * mask.betas.size());
  return members;
}

std::vector<ConditionRow> cmd_check_conditions(const RunConfig& cfg, std::ostream& log) {
  prepare_out(cfg);
  const ConditionFunctions fns =
      cfg.preset == "heat-log" ? heat_log_preset() : pme_power_preset(cfg.alpha, cfg.beta);
  std::vector<double> grid(cfg.u_points);
  for (int k = 0; k < cfg.u_points; ++k)
    grid[k] = cfg.u_points == 1 ? cfg.u_min
                                : cfg.u_min + (cfg.u_max - cfg.u_min) * k / (cfg.u_points - 1);
  const auto rows = scalar_conditions(fns, grid, cfg.d, cfg.c_rk);

  auto out = open_out(cfg.out / "conditions.csv");
  out << "u,b_theorem,b_proof,cond2_theorem,cond2_proof,cond3,cond1_theorem_ok,cond1_proof_ok,"
         "cond2_theorem_ok,cond2_proof_ok,cond3_ok\n";
  for (const auto& r : rows)
    out << fmt::format("{},{},{},{},{},{},{:d},{:d},{:d},{:d},{:d}\n", num(r.u), num(r.b_theorem),
                       num(r.b_proof), num(r.cond2_theorem), num(r.cond2_proof), num(r.cond3),
                       r.cond1_theorem_ok(), r.cond1_proof_ok(), r.cond2_theorem_ok(),
                       r.cond2_proof_ok(), r.cond3_ok());

  auto report = [&](const char* label, auto value, auto ok) {
    double lo = INFINITY, hi = -INFINITY;
    int passed = 0;
    for (const auto& r : rows) {
      lo = std::min(lo, value(r));
      hi = std::max(hi, value(r));
      passed += ok(r) ? 1 : 0;
    }
    const std::string range =
        lo == hi ? fmt::format("= {:.6g}", lo) : fmt::format("in [{:.6g}, {:.6g}]", lo, hi);
    log << fmt::format("{} {}: {} ({}/{})\n", label, range, passed == static_cast<int>(rows.size()) ? "PASS" : "FAIL",
                       passed, rows.size());
  };
  report("cond1 (theorem form)", [](const ConditionRow& r) { return r.b_theorem; },
         [](const ConditionRow& r) { return r.cond1_theorem_ok(); });
  report("cond1 (proof form)", [](const ConditionRow& r) { return r.b_proof; },
         [](const ConditionRow& r) { return r.cond1_proof_ok(); });
  report("cond2 (theorem form)", [](const ConditionRow& r) { return r.cond2_theorem; },
         [](const ConditionRow& r) { return r.cond2_theorem_ok(); });
  report("cond2 (proof form)", [](const ConditionRow& r) { return r.cond2_proof; },
         [](const ConditionRow& r) { return r.cond2_proof_ok(); });
  report("cond3", [](const ConditionRow& r) { return r.cond3; },
         [](const ConditionRow& r) { return r.cond3_ok(); });
  return rows;
}

bool cmd_dlss_constants(std::ostream& log) {
  const Rational c8 = dlss_c8_star();
  const Rational b12 = dlss_b12(c8);
  const bool b12_ok = b12 == Rational(20) / Rational(129);
  log << "b12(17/172)=" << b12 << (b12_ok ? " PASS" : " FAIL") << '\n';

  const Rational slope = dlss_db12(c8);
  const bool slope_ok = slope == 0;
  log << "db12/dc8(17/172)=" << slope << (slope_ok ? " PASS" : " FAIL") << '\n';

  const DlssChain chain = dlss_chain(parse_rational("-0.029"), c8);
  const double p = to_double(chain.p);
  const bool p_ok = p > 0.004 && p < 0.005;
  log << fmt::format("p(-0.029)={:.10g} in (0.004, 0.005){}\n", p, p_ok ? " PASS" : " FAIL");
  return b12_ok && slope_ok && p_ok;
}

}  // namespace erk::cli
