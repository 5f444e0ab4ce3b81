// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "zdiheat/config.hpp"
#include "zdiheat/experiment.hpp"
#include "zdiheat/greens.hpp"
#include "zdiheat/sim.hpp"
#include "zdiheat/zdi.hpp"

using namespace zdiheat;

namespace {

// Pinned tolerances.
constexpr double kRegulationFraction = 1e-2;     // criteria 1 and 10
constexpr double kScenarioSeconds = 60.0;
constexpr double kRatioLow = 1.6;                 // criterion 2
constexpr double kRatioHigh = 4.4;
constexpr std::size_t kRandomLayouts = 200;       // criterion 3
constexpr std::size_t kMaxActuators = 12;
constexpr double kInvertibilitySeconds = 5.0;
constexpr double kTruncationFactor = 2.0;         // criterion 4
constexpr std::size_t kExtraTerms = 10;
constexpr std::size_t kSteadyCases = 50;          // criterion 5
constexpr double kSteadyAbs = 1e-10;
constexpr double kStaticRelative = 1e-8;          // criterion 6
constexpr double kGreensTol = 1e-6;               // criterion 7
constexpr double kProbeSpacing = 1e-3;
constexpr std::size_t kJetSamples = 20;           // criterion 8
constexpr double kJetRelative = 1e-6;
constexpr double kOrderTarget = 2.0;              // criterion 9
constexpr double kOrderBand = 0.2;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Scenario {
  ExperimentConfig config;
  RunReport report;
  double seconds = 0.0;
  std::string error;
};

const Scenario& scenario() {
  static const Scenario s = [] {
    Scenario out;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("zdiheat_acceptance_" + std::to_string(::getpid()));
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out.report = run(out.config, dir.string());
    } catch (const Error& e) {
      out.error = e.what();
    }
    out.seconds = seconds_since(t0);
    std::filesystem::remove_all(dir);
    return out;
  }();
  return s;
}

Outcome scenario_reproduction() {
  const auto& s = scenario();
  if (!s.error.empty()) return {false, s.error};
  const auto& r = s.report;
  const double limit = kRegulationFraction * r.max_target;
  return {r.final_max_error <= limit && s.seconds < kScenarioSeconds,
          fmt("max|e_i(2)| = %.3g <= %.3g, runtime %.2f s < %.0f s", r.final_max_error, limit,
              s.seconds, kScenarioSeconds)};
}

Outcome model_equivalence() {
  const ExperimentConfig config;
  const Synthesis syn = synthesize(config);
  const auto& setup = syn.setup;
  auto u = [&](double t, std::span<double> out) { syn.controls(t, out); };
  auto alpha = [&](double t, std::span<double> out) {
    syn.controls(t, out);
    for (double& v : out) v = -v;
  };
  const auto initial = initial_profile(config);
  std::vector<double> d;
  for (std::size_t nx : {100, 200, 400}) {
    const SpaceTimeGrid grid(nx, config.nt, config.t_end);
    const auto a = simulate_delta(grid, setup.bc, setup.layout, alpha, initial);
    const auto b = simulate_jump(grid, setup.bc, setup.layout, u, initial);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.nt(); ++k) {
      for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        worst = std::max(worst, std::abs(a.sample(k, x) - b.sample(k, x)));
      }
    }
    d.push_back(worst);
  }
  const double r1 = d[0] / d[1];
  const double r2 = d[1] / d[2];
  const bool ok = r1 >= kRatioLow && r1 <= kRatioHigh && r2 >= kRatioLow && r2 <= kRatioHigh;
  return {ok, fmt("Linf %.3g, %.3g, %.3g at nx 100/200/400; ratios %.3f, %.3f in [%.1f, %.1f]", d[0],
                  d[1], d[2], r1, r2, kRatioLow, kRatioHigh)};
}

Outcome influence_invertibility() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> count(1, kMaxActuators);
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t failures = 0;
  double worst_cond = 0.0;
  for (std::size_t trial = 0; trial < kRandomLayouts; ++trial) {
    const std::size_t m = count(rng);
    std::vector<double> pts;
    for (std::size_t j = 0; j < m; ++j) pts.push_back(unit(rng));
    std::sort(pts.begin(), pts.end());
    // Redraw coincident or boundary points so the layout is admissible.
    bool admissible = pts.front() > 0.0 && pts.back() < 1.0;
    for (std::size_t j = 1; j < m; ++j) admissible = admissible && pts[j] > pts[j - 1];
    if (!admissible) {
      --trial;
      continue;
    }
    double k0 = 20.0 * unit(rng);
    double k1 = 20.0 * unit(rng);
    if (k0 + k1 == 0.0) k1 = 1.0;
    try {
      const InfluenceMatrix g(ActuatorLayout(pts), BoundaryParams(k0, k1));
      worst_cond = std::max(worst_cond, g.condition_estimate());
    } catch (const Error&) {
      ++failures;
    }
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < kInvertibilitySeconds,
          fmt("%zu layouts, %zu failures, worst condition %.3g, %.3f s < %.0f s", kRandomLayouts,
              failures, worst_cond, secs, kInvertibilitySeconds)};
}

struct SigmaResult {
  bool ok = false;
  std::string text;
};

// Scenario synthesis at the given sigma and bump; compares every actuator's
// control summed to N and to N + 10 terms over the transition.
SigmaResult truncation_at(double sigma, BumpForm form) {
  ExperimentConfig config;
  config.sigma = sigma;
  config.form = form;
  try {
    const Synthesis syn = synthesize(config);
    std::size_t n_max = 0;
    double diff = 0.0;
    double tol = 0.0;
    for (std::size_t j = 0; j < syn.states.size(); ++j) {
      const auto& tr = syn.truncations[j];
      n_max = std::max(n_max, tr.achieved_order);
      tol = tr.tolerance;
      SeriesTruncation longer = tr;
      longer.achieved_order = tr.achieved_order + kExtraTerms;
      if (longer.achieved_order + 1 > kMaxJetOrder) {
        return {false, fmt("s=%.1f N=%zu but N+%zu exceeds the jet cap", sigma, tr.achieved_order, kExtraTerms)};
      }
      for (int i = 1; i < 200; ++i) {
        const double t = config.duration * i / 200.0;
        diff = std::max(diff, std::abs(control_signal(t, syn.states[j], tr) -
                                       control_signal(t, syn.states[j], longer)));
      }
    }
    return {diff <= kTruncationFactor * tol, fmt("s=%.1f N<=%zu dN+10=%.2g", sigma, n_max, diff)};
  } catch (const Error& e) {
    return {false, fmt("s=%.1f %s", sigma, to_string(e.kind()))};
  }
}

Outcome convergence_boundary() {
  // The true Gevrey order of the standard bump is sigma, so it is the form
  // this criterion is judged on; the printed bump is order 2 for every sigma.
  bool ok = true;
  std::string detail = "standard bump:";
  for (double sigma : {1.1, 1.5, 1.9}) {
    const auto r = truncation_at(sigma, BumpForm::kStandard);
    ok = ok && r.ok;
    detail += " " + r.text + ";";
  }
  bool spec_rejects = false;
  try {
    GevreySpec(2.5, 1.0);
  } catch (const Error& e) {
    spec_rejects = e.kind() == ErrorKind::kDivergentSeries;
  }
  bool scan_rejects = false;
  try {
    GevreyBound b;
    b.m = 1.0;
    b.k = 1.0;
    b.order = 2.5;
    plan_truncation(2.5, b, kDefaultSeriesTolerance);
  } catch (const Error& e) {
    scan_rejects = e.kind() == ErrorKind::kDivergentSeries;
  }
  ok = ok && spec_rejects && scan_rejects;
  detail += fmt(" s=2.5 %s", spec_rejects && scan_rejects ? "DivergentSeries" : "not rejected");
  detail += " | printed bump:";
  for (double sigma : {1.1, 1.5, 1.9}) detail += " " + truncation_at(sigma, BumpForm::kPrinted).text + ";";
  return {ok, detail};
}

Outcome steady_oracle() {
  std::mt19937_64 rng(kSeed + 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> count(1, kMaxActuators);
  double worst = 0.0;
  for (std::size_t c = 0; c < kSteadyCases; ++c) {
    const std::size_t m = count(rng);
    std::vector<double> pts;
    for (std::size_t j = 0; j < m; ++j) pts.push_back((j + 0.1 + 0.8 * unit(rng)) / static_cast<double>(m));
    const ActuatorLayout layout(pts);
    const BoundaryParams bc(0.1 + 20 * unit(rng), 0.1 + 20 * unit(rng));
    std::vector<double> target(m);
    for (double& v : target) v = 2 * unit(rng) - 1;
    const auto plan = static_plan(target, layout, bc);
    const auto z = steady_state_oracle(layout, plan.alpha_bar, bc);
    for (std::size_t j = 0; j < m; ++j) worst = std::max(worst, std::abs(z(pts[j]) - target[j]));
  }
  return {worst <= kSteadyAbs, fmt("%zu cases, max |z(x_j) - target_j| = %.3g <= %.0e", kSteadyCases, worst, kSteadyAbs)};
}

Outcome static_input_output() {
  const ExperimentConfig config;
  const Synthesis syn = synthesize(config);
  const std::size_t m = syn.setup.layout.size();
  const double gain = syn.setup.bc.gain();
  std::vector<double> u(m);
  double worst = 0.0;
  for (double t : {config.duration, 1.25 * config.duration, 1.5 * config.duration, config.t_end}) {
    syn.controls(t, u);
    for (std::size_t j = 0; j < m; ++j) {
      const double expected = gain * syn.plan.ybar[j];
      worst = std::max(worst, std::abs(u[j] - expected) / std::abs(expected));
    }
  }
  return {worst <= kStaticRelative,
          fmt("max relative |u_j - k ybar_j| / |k ybar_j| = %.3g <= %.0e for t in [T, t_end]", worst,
              kStaticRelative)};
}

Outcome greens_checks() {
  const double h = kProbeSpacing;
  double bc_res = 0.0, jump_res = 0.0, cont_res = 0.0;
  for (double k0 : {0.0, 1.0, 10.0}) {
    for (double k1 : {0.5, 10.0}) {
      const BoundaryParams bc(k0, k1);
      for (int zi = 1; zi < 20; ++zi) {
        const double zeta = zi / 20.0;
        auto g = [&](double x) { return greens_eval(x, zeta, bc); };
        const double d0 = (-3 * g(0) + 4 * g(h) - g(2 * h)) / (2 * h);
        const double d1 = (3 * g(1) - 4 * g(1 - h) + g(1 - 2 * h)) / (2 * h);
        bc_res = std::max({bc_res, std::abs(d0 - k0 * g(0)), std::abs(d1 + k1 * g(1))});
        const double right = (-3 * g(zeta) + 4 * g(zeta + h) - g(zeta + 2 * h)) / (2 * h);
        const double left = (3 * g(zeta) - 4 * g(zeta - h) + g(zeta - 2 * h)) / (2 * h);
        jump_res = std::max(jump_res, std::abs(right - left - 1.0));
        // Each side extrapolated to zeta from its own probes.
        const double from_left = 2 * g(zeta - h) - g(zeta - 2 * h);
        const double from_right = 2 * g(zeta + h) - g(zeta + 2 * h);
        cont_res = std::max(cont_res, std::abs(from_right - from_left));
      }
    }
  }
  const double worst = std::max({bc_res, jump_res, cont_res});
  return {worst <= kGreensTol,
          fmt("boundary %.2g, flux jump %.2g, continuity %.2g (probe spacing %.0e) <= %.0e", bc_res,
              jump_res, cont_res, h, kGreensTol)};
}

// Relative FD agreement of jet orders 1-3 plus endpoint values and monotonicity.
std::pair<bool, std::string> jet_check(const GevreySpec& spec) {
  const GevreyFunction fn(spec);
  const double T = spec.duration();
  const auto bump = spec.form() == BumpForm::kStandard ? oracle::Bump::standard(spec.sigma())
                                                       : oracle::Bump::printed(spec.sigma());
  double worst = 0.0;
  for (std::size_t i = 0; i < kJetSamples; ++i) {
    const double tau = (static_cast<double>(i) + 0.5) / static_cast<double>(kJetSamples);
    const double t = tau * T;
    const auto jet = fn.jet(t, 3);
    // Step scale from the local log-derivative of the bump.
    const double s = tau * (1 - tau);
    const double dlog = bump.coeff * bump.power * std::pow(s, -bump.power - 1) * std::abs(1 - 2 * tau);
    const double h_max = 0.2 * T * std::min(s, 1.0 / std::max(1.0, dlog));
    // Past the midpoint phi rounds to 1 and differences lose the tail, so
    // use phi^(n)(t) = (-1)^(n+1) phi^(n)(T - t) and difference on the left.
    const bool mirrored = tau > 0.5;
    const double t_fd = mirrored ? T - t : t;
    for (int n = 1; n <= 3; ++n) {
      const double sign = mirrored && n % 2 == 0 ? -1.0 : 1.0;
      const double fd = sign * oracle::fd_sweep([&](double x) { return fn.phi(x); }, t_fd, n, h_max);
      const double scale = std::abs(fd);
      const double err = std::abs(jet[n] - fd);
      if (scale == 0.0) {
        if (jet[n] != 0.0) worst = INFINITY;
      } else {
        worst = std::max(worst, err / scale);
      }
    }
  }
  bool monotone = true;
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = fn.phi(T * i / 1000.0);
    monotone = monotone && v >= prev;
    prev = v;
  }
  const bool ends = fn.phi(0.0) == 0.0 && fn.phi(T) == 1.0;
  return {worst <= kJetRelative && monotone && ends,
          fmt("%s s=%.1f: max rel err %.2g, phi(0)=%g, phi(T)=%g, monotone %s", to_string(spec.form()),
              spec.sigma(), worst, fn.phi(0.0), fn.phi(T), monotone ? "yes" : "no")};
}

Outcome gevrey_jets() {
  const ExperimentConfig config;
  const auto a = jet_check(GevreySpec(config.sigma, config.duration, config.form));
  const auto b = jet_check(GevreySpec(1.5, config.duration, BumpForm::kStandard));
  return {a.first && b.first, a.second + "; " + b.second};
}

Outcome solver_orders() {
  const BoundaryParams bc(10.0, 10.0);
  const auto rep = order_of_accuracy(robin_mode_solution(bc), bc);
  const bool ok = std::abs(rep.spatial_order - kOrderTarget) <= kOrderBand &&
                  std::abs(rep.temporal_order - kOrderTarget) <= kOrderBand;
  return {ok, fmt("space %.3f, time %.3f (target %.1f +- %.1f)", rep.spatial_order, rep.temporal_order,
                  kOrderTarget, kOrderBand)};
}

Outcome off_actuator_tracking() {
  const auto& s = scenario();
  if (!s.error.empty()) return {false, s.error};
  const double limit = kRegulationFraction * s.report.max_target;
  return {s.report.midpoint_error <= limit,
          fmt("|z(0.5,2) - zD(0.5,2)| = %.3g <= %.3g", s.report.midpoint_error, limit)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> body;
  };
  const std::vector<Criterion> criteria{
      {1, "scenario_reproduction", scenario_reproduction},
      {2, "delta_jump_equivalence", model_equivalence},
      {3, "influence_invertibility", influence_invertibility},
      {4, "series_convergence_boundary", convergence_boundary},
      {5, "steady_oracle_equivalence", steady_oracle},
      {6, "static_input_output", static_input_output},
      {7, "greens_function_checks", greens_checks},
      {8, "gevrey_jets", gevrey_jets},
      {9, "solver_convergence_rates", solver_orders},
      {10, "off_actuator_tracking", off_actuator_tracking},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::printf("criterion %2d %-30s %s  %s\n", c.id, c.name, o.passed ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
