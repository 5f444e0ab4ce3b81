#include "zdiheat/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "outputs.hpp"
#include "zdiheat/greens.hpp"

namespace zdiheat {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs `body` as pipeline stage `stage`, recording its wall time.
template <class F>
auto staged(const char* stage, std::vector<StageTiming>& timings, F&& body) {
  const auto start = Clock::now();
  try {
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      timings.push_back({stage, seconds_since(start)});
    } else {
      auto result = body();
      timings.push_back({stage, seconds_since(start)});
      return result;
    }
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::size_t max_order_of(const std::vector<SeriesTruncation>& truncations) {
  std::size_t n = 0;
  for (const auto& t : truncations) n = std::max(n, t.achieved_order);
  return n;
}

}  // namespace

void Synthesis::controls(double t, std::span<double> out) const {
  const DerivativeJet unit = basis->jet(t, max_order_of(truncations) + 1);
  for (std::size_t j = 0; j < states.size(); ++j) {
    out[j] = control_series(setup.bc, unit.scaled(states[j].ybar()), truncations[j]);
  }
}

void Synthesis::reference(double t, std::span<const double> xs, std::span<double> out) const {
  const DerivativeJet unit = basis->jet(t, max_order_of(truncations));
  std::vector<double> zd(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) {
    const double xj = states[j].position();
    zd[j] = xi_series(xj, xj, setup.bc, unit.scaled(states[j].ybar()), truncations[j]);
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < states.size(); ++j) {
      sum += gamma_weight(xs[i], j, setup.layout, setup.bc, gamma) * zd[j];
    }
    out[i] = sum;
  }
}

namespace {

Synthesis synthesize_timed(const ExperimentConfig& config, std::vector<StageTiming>& timings) {
  ValidatedConfig setup = staged(kValidateStage, timings, [&] { return validate_config(config); });
  std::optional<Synthesis> out;
  staged("plan", timings, [&] {
    const InfluenceMatrix matrix(setup.layout, setup.bc);
    SteadyPlan plan = static_plan(setup.target, matrix);
    out.emplace(Synthesis{setup, nullptr, matrix.condition_estimate(), std::move(plan), {}, {}, {},
                          config.gamma});
  });
  Synthesis& s = *out;
  staged("truncation", timings, [&] {
    s.basis = std::make_shared<const GevreyFunction>(s.setup.spec);
    s.bound = fit_bound(*s.basis, kBoundFitOrder);
    for (std::size_t j = 0; j < s.setup.layout.size(); ++j) {
      s.states.emplace_back(j, s.setup.layout[j], s.setup.bc, s.plan.ybar[j], s.basis);
      s.truncations.push_back(
          plan_truncation(s.states.back(), s.bound, config.tolerance, config.max_order));
    }
  });
  return std::move(s);
}

}  // namespace

Synthesis synthesize(const ExperimentConfig& config) {
  std::vector<StageTiming> timings;
  return synthesize_timed(config, timings);
}

std::size_t RunReport::max_achieved_order() const {
  std::size_t n = 0;
  for (std::size_t v : achieved_orders) n = std::max(n, v);
  return n;
}

double RunReport::total_seconds() const {
  double s = 0.0;
  for (const auto& t : timings) s += t.seconds;
  return s;
}

RunReport run(const ExperimentConfig& config, const std::string& output_dir) {
  RunReport report;
  Synthesis syn = synthesize_timed(config, report.timings);
  const ValidatedConfig& setup = syn.setup;
  const std::size_t m = setup.layout.size();
  const SpaceTimeGrid& grid = setup.grid;
  const InitialFn initial = initial_profile(config);
  SolverOptions options;
  options.substeps = config.substeps;

  ControlFn u = [&](double t, std::span<double> out) { syn.controls(t, out); };
  ControlFn alpha = [&](double t, std::span<double> out) {
    syn.controls(t, out);
    for (double& v : out) v = -v;
  };
  const SimTrajectory delta = staged("simulate_delta", report.timings, [&] {
    return simulate_delta(grid, setup.bc, setup.layout, alpha, initial, options);
  });
  const SimTrajectory jump = staged("simulate_jump", report.timings, [&] {
    return simulate_jump(grid, setup.bc, setup.layout, u, initial, options);
  });
  const ErrorTrace trace = staged("analyze", report.timings, [&] {
    return regulation_errors(delta, setup.layout, [&](double t, std::span<const double> xs,
                                                       std::span<double> out) {
      syn.reference(t, xs, out);
    });
  });

  report.bound = syn.bound;
  report.condition_estimate = syn.condition_estimate;
  report.alpha_bar = syn.plan.alpha_bar;
  report.ybar = syn.plan.ybar;
  report.target = syn.plan.target;
  for (const auto& t : syn.truncations) {
    report.achieved_orders.push_back(t.achieved_order);
    report.tail_estimates.push_back(t.tail_estimate);
  }
  const std::size_t last = grid.nt() - 1;
  for (std::size_t i = 0; i < m; ++i) report.final_errors.push_back(trace.e(last, i));
  report.final_max_error = trace.max_abs(last);
  for (double v : report.target) report.max_target = std::max(report.max_target, std::abs(v));
  {
    const double xs[1] = {0.5};
    double ref[1] = {0.0};
    syn.reference(grid.t_end(), xs, ref);
    report.midpoint_error = std::abs(delta.sample(last, 0.5) - ref[0]);
  }
  for (std::size_t k = 0; k < grid.nt(); ++k) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      report.model_discrepancy =
          std::max(report.model_discrepancy, std::abs(delta.z(k, i) - jump.z(k, i)));
    }
  }
  for (double s : jump.snap_distances()) report.max_snap = std::max(report.max_snap, s);

  staged("write", report.timings, [&] {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) fail(ErrorKind::kIo, "cannot create output directory '" + output_dir + "'");
    const fs::path dir(output_dir);
    std::vector<double> controls(grid.nt() * m);
    for (std::size_t k = 0; k < grid.nt(); ++k) {
      for (std::size_t j = 0; j < m; ++j) controls[k * m + j] = -delta.control(k, j);
    }
    output::write_field_csv((dir / "field.csv").string(), delta);
    output::write_controls_csv((dir / "controls.csv").string(), grid, controls, m);
    output::write_errors_csv((dir / "errors.csv").string(), trace);

    output::write_heatmap_svg((dir / "field.svg").string(), delta, "z(x,t), delta-source model");
    std::vector<double> times(grid.nt());
    for (std::size_t k = 0; k < grid.nt(); ++k) times[k] = grid.t(k);
    std::vector<output::Series> control_series(m);
    for (std::size_t j = 0; j < m; ++j) {
      control_series[j].label = "u_" + std::to_string(j + 1);
      for (std::size_t k = 0; k < grid.nt(); ++k) control_series[j].values.push_back(controls[k * m + j]);
    }
    output::write_line_svg((dir / "controls.svg").string(), "control signals u_j(t)", "t", times,
                           control_series);
    std::vector<double> xs(grid.nx());
    for (std::size_t i = 0; i < grid.nx(); ++i) xs[i] = grid.x(i);
    std::vector<output::Series> snapshots;
    for (int q = 0; q <= 4; ++q) {
      const std::size_t k = last * static_cast<std::size_t>(q) / 4;
      output::Series s{fmt("t = %.3g", grid.t(k)), {}};
      for (std::size_t i = 0; i < grid.nx(); ++i) s.values.push_back(trace.tracking[k * grid.nx() + i]);
      snapshots.push_back(std::move(s));
    }
    output::write_line_svg((dir / "errors.svg").string(), "tracking error z - z^D snapshots", "x",
                           xs, snapshots);

    for (const char* name : {"field.csv", "controls.csv", "errors.csv", "field.svg", "controls.svg",
                             "errors.svg"}) {
      const std::string path = (dir / name).string();
      report.files.push_back({name, fs::file_size(path), sha256_file(path)});
    }
    std::FILE* f = std::fopen((dir / "report.txt").string().c_str(), "wb");
    if (!f) fail(ErrorKind::kIo, "cannot write report.txt");
    const std::string text = format_report(report, config);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
  });
  return report;
}

std::string format_report(const RunReport& r, const ExperimentConfig& config) {
  std::ostringstream out;
  char line[256];
  out << "# zdiheat run report\n\n## configuration\n" << format_config(config) << "\n";
  out << "## plan\n";
  std::snprintf(line, sizeof line, "influence matrix condition estimate (1-norm): %.6g\n",
                r.condition_estimate);
  out << line;
  std::snprintf(line, sizeof line, "Gevrey bound fit: M = %.6g, K = %.6g, order %.3g, %zu orders\n",
                r.bound.m, r.bound.k, r.bound.order, r.bound.fitted_orders);
  out << line;
  out << "\n  j  target               alpha_bar            ybar                 N   tail        e_j(t_end)\n";
  for (std::size_t j = 0; j < r.target.size(); ++j) {
    std::snprintf(line, sizeof line, "%3zu  %-20.12g %-20.12g %-20.12g %-3zu %-11.3g %.6g\n", j + 1,
                  r.target[j], r.alpha_bar[j], r.ybar[j], r.achieved_orders[j], r.tail_estimates[j],
                  r.final_errors[j]);
    out << line;
  }
  out << "\n## results\n";
  std::snprintf(line, sizeof line, "max_i |e_i(t_end)|        %.6g  (1e-2 * max|target| = %.6g)\n",
                r.final_max_error, 1e-2 * r.max_target);
  out << line;
  std::snprintf(line, sizeof line, "|z - z^D|(0.5, t_end)      %.6g\n", r.midpoint_error);
  out << line;
  std::snprintf(line, sizeof line, "delta vs jump max |dz|     %.6g  (max snap %.3g)\n",
                r.model_discrepancy, r.max_snap);
  out << line;
  out << "\n## timings (s)\n";
  for (const auto& t : r.timings) {
    std::snprintf(line, sizeof line, "%-16s %.4f\n", t.stage.c_str(), t.seconds);
    out << line;
  }
  out << "\n## files (sha256)\n";
  for (const auto& f : r.files) out << f.sha256 << "  " << f.bytes << "  " << f.name << "\n";
  return out.str();
}

namespace {

CheckResult check(std::string name, double measured, double tolerance, bool passed,
                  std::string detail = {}) {
  return {std::move(name), measured, tolerance, passed, std::move(detail)};
}

// Delta vs jump discrepancies over nx = 100, 200, 400 for the config's controls.
std::vector<double> equivalence_levels(const ExperimentConfig& config, const Synthesis& syn) {
  std::vector<double> out;
  for (std::size_t nx : {100, 200, 400}) {
    const SpaceTimeGrid grid(nx, config.nt, config.t_end);
    SolverOptions options;
    options.substeps = config.substeps;
    ControlFn u = [&](double t, std::span<double> v) { syn.controls(t, v); };
    ControlFn alpha = [&](double t, std::span<double> v) {
      syn.controls(t, v);
      for (double& a : v) a = -a;
    };
    const InitialFn initial = initial_profile(config);
    const SimTrajectory a = simulate_delta(grid, syn.setup.bc, syn.setup.layout, alpha, initial, options);
    const SimTrajectory b = simulate_jump(grid, syn.setup.bc, syn.setup.layout, u, initial, options);
    double d = 0.0;
    for (std::size_t k = 0; k < grid.nt(); ++k) {
      for (std::size_t i = 0; i < nx; ++i) d = std::max(d, std::abs(a.z(k, i) - b.z(k, i)));
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace

std::vector<CheckResult> verify(const ExperimentConfig& config) {
  std::vector<CheckResult> checks;
  const ValidatedConfig setup = validate_config(config);
  const BoundaryParams& bc = setup.bc;
  const ActuatorLayout& layout = setup.layout;

  {
    double bc_res = 0.0, jump_res = 0.0, cont = 0.0, sym = 0.0;
    const double h = 1e-3;
    for (double zeta : layout.points()) {
      const double g0 = greens_eval(0.0, zeta, bc), g1 = greens_eval(1.0, zeta, bc);
      bc_res = std::max(bc_res, std::abs((greens_eval(h, zeta, bc) - g0) / h - bc.k0() * g0));
      bc_res = std::max(bc_res, std::abs((g1 - greens_eval(1.0 - h, zeta, bc)) / h + bc.k1() * g1));
      const double right = (greens_eval(zeta + h, zeta, bc) - greens_eval(zeta, zeta, bc)) / h;
      const double left = (greens_eval(zeta, zeta, bc) - greens_eval(zeta - h, zeta, bc)) / h;
      jump_res = std::max(jump_res, std::abs(right - left - 1.0));
      cont = std::max(cont, std::abs(greens_eval(zeta + 1e-12, zeta, bc) - greens_eval(zeta - 1e-12, zeta, bc)));
      for (double x : layout.points()) {
        const double a = greens_eval(x, zeta, bc), b = greens_eval(zeta, x, bc);
        sym = std::max(sym, std::abs(a - b) / std::max(std::abs(a), 1e-300));
      }
    }
    checks.push_back(check("green_boundary_residual", bc_res, 1e-6, bc_res <= 1e-6));
    checks.push_back(check("green_flux_jump", jump_res, 1e-6, jump_res <= 1e-6));
    checks.push_back(check("green_continuity", cont, 1e-10, cont <= 1e-10));
    checks.push_back(check("green_symmetry", sym, 1e-15, sym <= 1e-15));
  }
  {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> count(1, 12);
    std::size_t failures = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const BoundaryParams rbc = trial == 0 ? bc : BoundaryParams(20.0 * unit(rng), 0.01 + 20.0 * unit(rng));
      const std::size_t m = count(rng);
      std::vector<double> pts;
      while (pts.size() < m) {
        const double x = 0.001 + 0.998 * unit(rng);
        if (std::all_of(pts.begin(), pts.end(), [&](double p) { return std::abs(p - x) >= 1e-3; })) {
          pts.push_back(x);
        }
      }
      std::sort(pts.begin(), pts.end());
      try {
        const InfluenceMatrix mat(ActuatorLayout(pts), rbc);
        if (!(std::abs(mat.determinant()) > 0.0)) ++failures;
        worst = std::max(worst, mat.condition_estimate());
      } catch (const Error&) {
        ++failures;
      }
    }
    checks.push_back(check("influence_invertibility", static_cast<double>(failures), 0.0, failures == 0,
                           "worst condition " + format_number(worst)));
  }

  const Synthesis syn = synthesize(config);
  const double gain = bc.gain();
  {
    const PiecewiseLinear zbar = steady_state_oracle(layout, syn.plan.alpha_bar, bc);
    double res = 0.0;
    for (std::size_t i = 0; i < layout.size(); ++i) {
      res = std::max(res, std::abs(zbar(layout[i]) - setup.target[i]));
    }
    checks.push_back(check("steady_oracle_equivalence", res, 1e-10, res <= 1e-10));
    double gres = 0.0;
    for (int q = 0; q <= 100; ++q) {
      const double x = q / 100.0;
      double sum = 0.0;
      for (std::size_t j = 0; j < layout.size(); ++j) {
        sum += gamma_weight(x, j, layout, bc) * steady_xi_factor(layout[j], bc) * syn.plan.ybar[j];
      }
      gres = std::max(gres, std::abs(sum - zbar(x)));
    }
    checks.push_back(check("gamma_steady_consistency", gres, 1e-10, gres <= 1e-10));
  }
  {
    const double t_mid = 0.5 * setup.spec.duration();
    double diff = 0.0, cont = 0.0;
    bool capped = false;
    for (std::size_t j = 0; j < syn.states.size(); ++j) {
      SeriesTruncation longer = syn.truncations[j];
      longer.achieved_order = std::min(longer.achieved_order + 10, config.max_order);
      capped = capped || longer.achieved_order < syn.truncations[j].achieved_order + 10;
      diff = std::max(diff, std::abs(control_signal(t_mid, syn.states[j], syn.truncations[j]) -
                                     control_signal(t_mid, syn.states[j], longer)));
      cont = std::max(cont, continuity_check(syn.states[j], syn.truncations[j], t_mid));
    }
    checks.push_back(check("truncation_self_consistency", diff, 2.0 * config.tolerance,
                           diff <= 2.0 * config.tolerance,
                           std::string("N vs N+10 at t = T/2") + (capped ? " (N+10 capped)" : "")));
    checks.push_back(check("branch_continuity", cont, 10.0 * config.tolerance,
                           cont <= 10.0 * config.tolerance));
    double rel = 0.0;
    const double t_late = setup.spec.duration() + 1.0;
    for (std::size_t j = 0; j < syn.states.size(); ++j) {
      const double expected = gain * syn.plan.ybar[j];
      const double u = control_signal(t_late, syn.states[j], syn.truncations[j]);
      rel = std::max(rel, std::abs(u - expected) / std::max(std::abs(expected), 1e-300));
    }
    checks.push_back(check("static_input_output", rel, 1e-8, rel <= 1e-8));
  }
  {
    const std::vector<double> d = equivalence_levels(config, syn);
    const double r1 = d[0] / d[1], r2 = d[1] / d[2];
    const bool ok = r1 >= 1.6 && r1 <= 4.4 && r2 >= 1.6 && r2 <= 4.4;
    checks.push_back(check("model_equivalence_refinement", std::min(r1, r2), 1.6, ok,
                           "discrepancies " + format_number(d[0]) + ", " + format_number(d[1]) +
                               ", " + format_number(d[2]) + "; ratios " + format_number(r1) + ", " +
                               format_number(r2)));
  }
  {
    const AccuracyReport acc = order_of_accuracy(robin_mode_solution(bc), bc);
    const double dev = std::max(std::abs(acc.spatial_order - 2.0), std::abs(acc.temporal_order - 2.0));
    checks.push_back(check("solver_order", dev, 0.2, dev <= 0.2,
                           "space " + format_number(acc.spatial_order) + ", time " +
                               format_number(acc.temporal_order)));
  }
  return checks;
}

std::string format_checks(const std::vector<CheckResult>& checks) {
  std::ostringstream out;
  char line[512];
  std::snprintf(line, sizeof line, "%-30s %-6s %-14s %-14s %s\n", "check", "result", "measured",
                "tolerance", "detail");
  out << line;
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-30s %-6s %-14.6g %-14.6g %s\n", c.name.c_str(),
                  c.passed ? "PASS" : "FAIL", c.measured, c.tolerance, c.detail.c_str());
    out << line;
  }
  return out.str();
}

std::vector<SweepRow> sweep(const ExperimentConfig& config, const std::string& parameter,
                            const std::vector<double>& values, const std::string& output_dir,
                            std::size_t workers) {
  if (parameter != "sigma" && parameter != "m" && parameter != "nx" && parameter != "tolerance") {
    fail(ErrorKind::kConfig, "sweep parameter must be one of sigma, m, nx, tolerance (got '" +
                                 parameter + "')");
  }
  for (double v : values) {
    if ((parameter == "m" || parameter == "nx") && !(v >= 1.0 && v == std::floor(v))) {
      fail(ErrorKind::kConfig, "sweep over " + parameter + " needs positive integer values");
    }
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create output directory '" + output_dir + "'");

  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      ExperimentConfig c = config;
      const double v = values[i];
      if (parameter == "sigma") c.sigma = v;
      if (parameter == "tolerance") c.tolerance = v;
      if (parameter == "nx") c.nx = static_cast<std::size_t>(v);
      if (parameter == "m") {
        c.uniform_m = static_cast<std::size_t>(v);
        c.points.clear();
        if (c.target == TargetKind::kValues) c.target = TargetKind::kSine;
      }
      char name[64];
      std::snprintf(name, sizeof name, "%s_%03zu", parameter.c_str(), i);
      c.output_dir = (fs::path(output_dir) / name).string();
      SweepRow& row = rows[i];
      row.value = v;
      const auto start = Clock::now();
      try {
        const RunReport r = run(c, c.output_dir);
        row.status = "ok";
        row.max_error = r.final_max_error;
        row.achieved_order = r.max_achieved_order();
        row.model_discrepancy = r.model_discrepancy;
      } catch (const Error& e) {
        row.status = to_string(e.kind());
        row.message = e.what();
      }
      row.runtime = seconds_since(start);
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(workers, values.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const std::string path = (fs::path(output_dir) / "summary.csv").string();
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) fail(ErrorKind::kIo, "cannot write '" + path + "'");
  std::fputs("value,status,max_error,achieved_order,model_discrepancy,runtime_s,message\n", f);
  for (const auto& r : rows) {
    std::string msg = r.message;
    for (std::size_t p = msg.find('"'); p != std::string::npos; p = msg.find('"', p + 2)) msg.insert(p, "\"");
    std::fprintf(f, "%.17g,%s,%.17g,%zu,%.17g,%.6f,\"%s\"\n", r.value, r.status.c_str(), r.max_error,
                 r.achieved_order, r.model_discrepancy, r.runtime, msg.c_str());
  }
  std::fclose(f);
  return rows;
}

}  // namespace zdiheat
