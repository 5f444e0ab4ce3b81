#include "zdiheat/gevrey.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

#include "zdiheat/error.hpp"
#include "zdiheat/quadrature.hpp"
#include "zdiheat/taylor.hpp"

namespace zdiheat {
namespace {

// Below this log-magnitude the bump and all derivatives up to the jet cap are
// far under the smallest subnormal.
constexpr double kNegligibleLogBump = -1.0e5;
// Orders used to pick the jet scale; fixed so jets of different length agree.
constexpr std::size_t kScaleProbeOrder = 16;
// Absolute tolerance on the bump integral, whose peak value is one.
constexpr double kQuadratureTolerance = 1.0e-13;
constexpr double kTailRelativeTolerance = 1.0e-15;

}  // namespace

GevreyFunction::GevreyFunction(GevreySpec spec) : spec_(spec) {
  if (spec_.form() == BumpForm::kStandard) {
    coeff_ = 1.0;
    power_ = spec_.epsilon();
  } else {
    coeff_ = spec_.epsilon();
    power_ = 1.0;
  }
  peak_g_ = coeff_ * std::pow(4.0, power_);
  peak_width_ = 1.0 / std::sqrt(8.0 * power_ * peak_g_);
  half_mass_ = integrate_bump(0.0, 0.5);
  if (!(half_mass_ > 0.0) || !std::isfinite(half_mass_)) {
    fail(ErrorKind::kInvalidArgument, "Gevrey normalization integral is not positive");
  }
}

double GevreyFunction::log_bump(double tau) const {
  if (!(tau > 0.0 && tau < 1.0)) return -INFINITY;
  const double d = (2.0 * tau - 1.0) * (2.0 * tau - 1.0);
  // g(tau) - g(1/2) = g(1/2) * ((4 tau (1-tau))^(-power) - 1), 4 tau (1-tau) = 1 - d.
  const double excess = peak_g_ * std::expm1(-power_ * std::log1p(-d));
  return std::isfinite(excess) ? -excess : -INFINITY;
}

double GevreyFunction::integrate_bump(double a, double b) const {
  if (b <= a) return 0.0;
  // Panels shrink geometrically towards the peak so a narrow bump is never
  // stepped over by the first Kronrod sweep.
  std::vector<double> breaks{0.0, 0.5};
  for (double width = peak_width_ * 0.25; width < 0.5; width *= 2.0) {
    breaks.push_back(0.5 - width);
  }
  std::sort(breaks.begin(), breaks.end());

  auto integrand = [this](double tau) { return std::exp(log_bump(tau)); };
  std::vector<std::pair<double, double>> pieces;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]);
    const double hi = std::min(b, breaks[i + 1]);
    if (hi > lo) pieces.emplace_back(lo, hi);
  }
  const double piece_tol = kQuadratureTolerance / static_cast<double>(std::max<std::size_t>(1, pieces.size()));
  double total = 0.0;
  for (const auto& [lo, hi] : pieces) {
    // The bump rises towards 1/2, so w(hi) (hi - lo) caps the piece; tying
    // the tolerance to it keeps far-tail values accurate in relative terms.
    const double cap = std::exp(log_bump(std::min(hi, 0.5))) * (hi - lo);
    const double tol = std::max(std::min(piece_tol, kTailRelativeTolerance * cap), DBL_MIN);
    total += integrate_adaptive(integrand, lo, hi, tol).value;
  }
  return total;
}

double GevreyFunction::phi(double t) const {
  const double tau = t / spec_.duration();
  if (tau <= 0.0) return 0.0;
  if (tau >= 1.0) return 1.0;
  // The bump is symmetric about 1/2; integrate from the nearer end.
  if (tau <= 0.5) return integrate_bump(0.0, tau) / (2.0 * half_mass_);
  return 1.0 - integrate_bump(0.0, 1.0 - tau) / (2.0 * half_mass_);
}

DerivativeJet GevreyFunction::jet(double t, std::size_t order) const {
  if (order > kMaxJetOrder) {
    throw Error(ErrorKind::kOverflowAtOrder,
                "jet order " + std::to_string(order) + " exceeds the cap of " +
                    std::to_string(kMaxJetOrder),
                static_cast<int>(order));
  }
  std::vector<double> out(order + 1, 0.0);
  const double duration = spec_.duration();
  const double tau = t / duration;
  if (tau <= 0.0) return DerivativeJet(std::move(out));
  if (tau >= 1.0) {
    out[0] = 1.0;
    return DerivativeJet(std::move(out));
  }
  out[0] = phi(t);
  if (order == 0) return DerivativeJet(std::move(out));

  const double log_peak = log_bump(tau);
  if (log_peak < kNegligibleLogBump) return DerivativeJet(std::move(out));

  // Taylor coefficients of h = log(w/w(1/2)) in the scaled variable u with
  // tau = tau0 + S u. A first scale of half the distance to the nearest
  // singularity keeps the power series convergent; a second rescaling pulls
  // all |h_n| (n >= 1) under one so exp(h) stays well inside double range.
  const std::size_t series_order = std::max(order - 1, kScaleProbeOrder);
  const double trial_scale = 0.5 * std::min(tau, 1.0 - tau);
  TaylorSeries<double> four_p(series_order);
  four_p[0] = 1.0 - (2.0 * tau - 1.0) * (2.0 * tau - 1.0);
  four_p[1] = 4.0 * trial_scale * (1.0 - 2.0 * tau);
  if (series_order >= 2) four_p[2] = -4.0 * trial_scale * trial_scale;
  TaylorSeries<double> h = power(four_p, -power_) * (-peak_g_);
  h[0] = 0.0;

  double growth = 1.0;
  for (std::size_t n = 1; n <= kScaleProbeOrder; ++n) {
    const double mag = std::abs(h[n]);
    if (mag > 0.0) growth = std::max(growth, std::pow(mag, 1.0 / static_cast<double>(n)));
  }
  double shrink = 1.0;
  for (std::size_t n = 1; n <= series_order; ++n) {
    shrink /= growth;
    h[n] *= shrink;
  }
  const double scale = trial_scale / growth;
  const TaylorSeries<double> w = exponential(h);

  const double log_norm = std::log(2.0 * half_mass_);
  const double log_scale = std::log(scale);
  const double log_duration = std::log(duration);
  const double log_max = std::log(DBL_MAX);
  for (std::size_t n = 0; n + 1 <= order; ++n) {
    if (w[n] == 0.0) continue;
    const double nd = static_cast<double>(n);
    // phi^(n+1)(t) = n! w_n / (S^n Z T^(n+1)) * w(1/2) e^{h0}
    const double log_mag = std::lgamma(nd + 1.0) + std::log(std::abs(w[n])) + log_peak -
                           nd * log_scale - log_norm - (nd + 1.0) * log_duration;
    if (log_mag > log_max || !std::isfinite(w[n])) {
      throw Error(ErrorKind::kOverflowAtOrder,
                  "derivative of order " + std::to_string(n + 1) + " at t=" + format_number(t) +
                      " exceeds the floating-point range",
                  static_cast<int>(n + 1));
    }
    out[n + 1] = std::copysign(std::exp(log_mag), w[n]);
  }
  return DerivativeJet(std::move(out));
}

std::vector<double> GevreyFunction::sample_times(std::size_t uniform_count) const {
  std::vector<double> taus;
  taus.reserve(uniform_count + 65);
  for (std::size_t i = 0; i < uniform_count; ++i) {
    taus.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(uniform_count));
  }
  for (int j = -32; j <= 32; ++j) {
    const double tau = 0.5 + peak_width_ * 0.25 * j;
    if (tau > 0.0 && tau < 1.0) taus.push_back(tau);
  }
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  for (double& tau : taus) tau *= spec_.duration();
  return taus;
}

double phi(double t, const GevreySpec& spec) { return GevreyFunction(spec).phi(t); }

DerivativeJet phi_jet(double t, const GevreySpec& spec, std::size_t order) {
  return GevreyFunction(spec).jet(t, order);
}

GevreyBound gevrey_bound_fit(std::span<const DerivativeJet> samples, const GevreySpec& spec) {
  std::size_t orders = kMaxJetOrder;
  for (const auto& jet : samples) orders = std::min(orders, jet.order());
  if (samples.empty() || orders < 3) {
    fail(ErrorKind::kInsufficientData, "Gevrey bound fit needs jets of at least order 3");
  }
  const double s = spec.gevrey_order();

  // envelope[k] = max_t |phi^(k+1)(t)|
  std::vector<double> envelope(orders, 0.0);
  for (const auto& jet : samples) {
    for (std::size_t k = 0; k < orders; ++k) {
      envelope[k] = std::max(envelope[k], std::abs(jet[k + 1]));
    }
  }

  GevreyBound bound;
  bound.order = s;
  bound.fitted_orders = orders;
  if (std::all_of(envelope.begin(), envelope.end(), [](double v) { return v == 0.0; })) {
    bound.m = 0.0;
    bound.k = 1.0;
    return bound;
  }

  // log envelope[k] - s log k! ~ log M - k log K
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < orders; ++k) {
    if (envelope[k] <= 0.0) continue;
    const double x = static_cast<double>(k);
    const double y = std::log(envelope[k]) - s * std::lgamma(x + 1.0);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  double log_k = 0.0;
  if (count >= 2) {
    const double n = static_cast<double>(count);
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    log_k = -slope;
  }
  double log_m = -INFINITY;
  for (std::size_t k = 0; k < orders; ++k) {
    if (envelope[k] <= 0.0) continue;
    const double x = static_cast<double>(k);
    log_m = std::max(log_m, std::log(envelope[k]) - s * std::lgamma(x + 1.0) + x * log_k);
  }
  bound.k = std::exp(log_k);
  bound.m = std::exp(log_m);
  return bound;
}

GevreyBound fit_bound(const GevreyFunction& fn, std::size_t order) {
  std::vector<DerivativeJet> jets;
  const auto times = fn.sample_times();
  jets.reserve(times.size());
  for (double t : times) jets.push_back(fn.jet(t, order));
  return gevrey_bound_fit(jets, fn.spec());
}

}  // namespace zdiheat
