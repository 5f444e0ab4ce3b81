#include "zdiheat/zdi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zdiheat/error.hpp"

namespace zdiheat {
namespace {

// Consecutive growing terms that flag a diverging evaluation.
constexpr std::size_t kGrowthRun = 5;

double log_term_bound(double s, double log_m, double log_k, std::size_t n) {
  const double nd = static_cast<double>(n);
  return log_m + nd * std::log(2.0) + s * std::lgamma(nd + 1.0) - std::lgamma(2.0 * nd + 1.0) -
         nd * log_k;
}

// B_{n+1} / B_n.
double term_ratio(double s, double k, std::size_t n) {
  const double nd = static_cast<double>(n);
  return std::pow(nd + 1.0, s - 1.0) / ((2.0 * nd + 1.0) * k);
}

void check_terms(std::span<const double> magnitudes, double tolerance, const char* what) {
  const std::size_t n = magnitudes.size();
  if (n > kGrowthRun) {
    bool growing = true;
    for (std::size_t i = n - kGrowthRun; i < n; ++i) {
      if (!(magnitudes[i] > magnitudes[i - 1])) growing = false;
    }
    // growth far below the tolerance is harmless (e.g. the flat start of phi)
    if (growing && magnitudes.back() > tolerance) {
      fail(ErrorKind::kDivergentSeries,
           std::string(what) + " series terms grew for " + std::to_string(kGrowthRun) +
               " consecutive orders");
    }
  }
  if (n > 1 && magnitudes.back() > tolerance) {
    fail(ErrorKind::kTruncationFailure,
         std::string(what) + " series: last term " + format_number(magnitudes.back()) +
             " exceeds the tolerance at order " + std::to_string(n - 1));
  }
}

// Even and odd Taylor parts of cosh/sinh-type factors:
// even[k] = a^(2k)/(2k)!, odd[k] = a^(2k+1)/(2k+1)!.
void hyperbolic_parts(double a, std::size_t n, std::vector<double>& even, std::vector<double>& odd) {
  even.assign(n + 1, 0.0);
  odd.assign(n + 1, 0.0);
  even[0] = 1.0;
  odd[0] = a;
  const double a2 = a * a;
  for (std::size_t k = 1; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    even[k] = even[k - 1] * a2 / ((2.0 * kd - 1.0) * (2.0 * kd));
    odd[k] = odd[k - 1] * a2 / ((2.0 * kd) * (2.0 * kd + 1.0));
  }
}

}  // namespace

SeriesTruncation plan_truncation(double s, const GevreyBound& bound, double tolerance,
                                 std::size_t max_order, double prefactor) {
  require(tolerance > 0.0, "series tolerance must be positive");
  require(bound.k > 0.0 && bound.m >= 0.0, "Gevrey bound needs K > 0 and M >= 0");
  require(prefactor >= 0.0, "series prefactor must be nonnegative");
  if (s > 2.0) {
    fail(ErrorKind::kDivergentSeries,
         "Gevrey order " + format_number(s) + " > 2: the flatness series diverge");
  }
  if (s == 2.0 && 2.0 * bound.k <= 1.0) {
    fail(ErrorKind::kDivergentSeries,
         "Gevrey order 2 with 2K = " + format_number(2.0 * bound.k) + " <= 1: no convergence");
  }
  SeriesTruncation trunc;
  trunc.max_order = max_order;
  trunc.tolerance = tolerance;
  if (std::isinf(tolerance) || bound.m == 0.0 || prefactor == 0.0) return trunc;

  const double log_m = std::log(bound.m) + std::log(prefactor);
  const double log_k = std::log(bound.k);
  const double log_tol = std::log(tolerance);
  for (std::size_t n = 0; n <= max_order; ++n) {
    // tail over orders > n, majorized geometrically from order n + 1 on
    const double r = term_ratio(s, bound.k, n + 1);
    if (r >= 1.0) continue;
    const double log_tail = log_term_bound(s, log_m, log_k, n + 1) - std::log1p(-r);
    if (log_tail <= log_tol) {
      trunc.achieved_order = n;
      trunc.tail_estimate = std::exp(log_tail);
      return trunc;
    }
  }
  fail(ErrorKind::kTruncationFailure,
       "series bound stays above tolerance " + format_number(tolerance) + " up to order " +
           std::to_string(max_order));
}

SeriesTruncation plan_truncation(const GevreySpec& spec, const GevreyBound& bound, double tolerance,
                                 std::size_t max_order, double prefactor) {
  return plan_truncation(spec.gevrey_order(), bound, tolerance, max_order, prefactor);
}

ZdiState::ZdiState(std::size_t index, double position, BoundaryParams bc, double ybar,
                   std::shared_ptr<const GevreyFunction> basis)
    : index_(index), position_(position), bc_(bc), ybar_(ybar), basis_(std::move(basis)) {
  require(position > 0.0 && position < 1.0, "actuator position must lie in (0,1)");
  require(std::isfinite(ybar), "flat output amplitude must be finite");
  require(basis_ != nullptr, "zero dynamics need a basis function");
}

DerivativeJet ZdiState::flat_jet(double t, std::size_t order) const {
  return basis_->jet(t, order).scaled(ybar_);
}

double ZdiState::series_prefactor(const GevreyBound& bound) const {
  return std::abs(ybar_) * (1.0 + bc_.k0()) * (1.0 + bc_.k1()) * std::max(1.0, bound.k);
}

SeriesTruncation plan_truncation(const ZdiState& state, const GevreyBound& bound, double tolerance,
                                 std::size_t max_order) {
  return plan_truncation(state.basis().spec(), bound, tolerance, max_order,
                         state.series_prefactor(bound));
}

double xi_series(double x, double xj, const BoundaryParams& bc, const DerivativeJet& jet,
                 const SeriesTruncation& trunc, Branch branch) {
  const std::size_t n_max = trunc.achieved_order;
  require(jet.order() >= n_max, "flat-output jet is shorter than the truncation order");
  if (branch == Branch::kAuto) branch = x < xj ? Branch::kLeft : Branch::kRight;
  // Left: (k0 sinh(a)/.. + cosh(a)) with a = x, times (k1 sinh(b)/.. - cosh(b)) with b = x_j - 1.
  const double a = branch == Branch::kLeft ? x : xj;
  const double b = branch == Branch::kLeft ? xj - 1.0 : x - 1.0;
  std::vector<double> ae, ao, be, bo;
  hyperbolic_parts(a, n_max, ae, ao);
  hyperbolic_parts(b, n_max, be, bo);
  std::vector<double> left(n_max + 1), right(n_max + 1);
  for (std::size_t k = 0; k <= n_max; ++k) {
    left[k] = bc.k0() * ao[k] + ae[k];
    right[k] = bc.k1() * bo[k] - be[k];
  }
  double sum = 0.0;
  std::vector<double> magnitudes;
  magnitudes.reserve(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    double c = 0.0;
    for (std::size_t k = 0; k <= n; ++k) c += left[k] * right[n - k];
    const double term = c * jet[n];
    sum += term;
    magnitudes.push_back(std::abs(term));
  }
  check_terms(magnitudes, trunc.tolerance, "xi");
  return sum;
}

double xi_eval(double x, double t, const ZdiState& state, const SeriesTruncation& trunc,
               Branch branch) {
  require(x >= 0.0 && x <= 1.0, "xi is defined on [0,1]");
  return xi_series(x, state.position(), state.bc(), state.flat_jet(t, trunc.achieved_order), trunc,
                   branch);
}

double control_series(const BoundaryParams& bc, const DerivativeJet& jet,
                      const SeriesTruncation& trunc) {
  const std::size_t n_max = trunc.achieved_order;
  require(jet.order() >= n_max + 1, "control series needs the jet to order N + 1");
  const double k0k1 = bc.k0() * bc.k1();
  const double k0pk1 = bc.k0() + bc.k1();
  double inv_even = 1.0;  // 1/(2n)!
  double inv_odd = 1.0;   // 1/(2n+1)!
  double sum = 0.0;
  std::vector<double> magnitudes;
  magnitudes.reserve(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (n > 0) {
      const double nd = static_cast<double>(n);
      inv_even = inv_odd / (2.0 * nd);
      inv_odd = inv_even / (2.0 * nd + 1.0);
    }
    const double term = k0k1 * jet[n] * inv_odd + k0pk1 * jet[n] * inv_even + jet[n + 1] * inv_odd;
    sum += term;
    magnitudes.push_back(std::abs(term));
  }
  check_terms(magnitudes, trunc.tolerance, "control");
  return sum;
}

double control_signal(double t, const ZdiState& state, const SeriesTruncation& trunc) {
  return control_series(state.bc(), state.flat_jet(t, trunc.achieved_order + 1), trunc);
}

double continuity_check(const ZdiState& state, const SeriesTruncation& trunc, double t) {
  const DerivativeJet jet = state.flat_jet(t, trunc.achieved_order);
  const double xj = state.position();
  const double left = xi_series(xj, xj, state.bc(), jet, trunc, Branch::kLeft);
  const double right = xi_series(xj, xj, state.bc(), jet, trunc, Branch::kRight);
  return std::abs(left - right);
}

std::vector<double> zero_dynamics_outputs(double t, std::span<const ZdiState> states,
                                          std::span<const SeriesTruncation> truncations) {
  require(states.size() == truncations.size(), "one truncation per actuator is required");
  std::vector<double> out(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) {
    out[j] = xi_eval(states[j].position(), t, states[j], truncations[j]);
  }
  return out;
}

double reference_profile(double x, double t, const SteadyPlan& plan,
                         std::span<const ZdiState> states,
                         std::span<const SeriesTruncation> truncations, GammaForm form) {
  require(states.size() == plan.ybar.size(), "plan and zero dynamics disagree on actuator count");
  std::vector<double> points(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) points[j] = states[j].position();
  const ActuatorLayout layout(std::move(points));
  const BoundaryParams& bc = states.front().bc();
  const std::vector<double> zd = zero_dynamics_outputs(t, states, truncations);
  double sum = 0.0;
  for (std::size_t j = 0; j < states.size(); ++j) sum += gamma_weight(x, j, layout, bc, form) * zd[j];
  return sum;
}

}  // namespace zdiheat
