#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "zdiheat/types.hpp"

namespace zdiheat {

/// Hard cap on jet order; requests beyond it raise OverflowAtOrder.
inline constexpr std::size_t kMaxJetOrder = 80;

/// Smooth monotone transition phi: R -> [0,1], phi = 0 for t <= 0 and
/// phi = 1 for t >= T, built from the normalized bump integral
///   phi(t) = int_0^{t/T} w / int_0^1 w.
///
/// The bump is handled in log space (relative to its peak at tau = 1/2) so
/// that large epsilon does not underflow. The normalizing integral is
/// computed once at construction; the object is immutable afterwards and
/// safe to share between threads.
class GevreyFunction {
 public:
  explicit GevreyFunction(GevreySpec spec);

  const GevreySpec& spec() const noexcept { return spec_; }

  double phi(double t) const;

  /// [phi(t), phi'(t), ..., phi^(order)(t)].
  DerivativeJet jet(double t, std::size_t order) const;

  /// Bump-adapted sample times covering [0,T]: a uniform grid plus a cluster
  /// around the peak scaled by the bump width.
  std::vector<double> sample_times(std::size_t uniform_count = 256) const;

  /// Characteristic width (in normalized time) of the bump around its peak.
  double peak_width() const noexcept { return peak_width_; }

 private:
  // log of w(tau)/w(1/2); -inf outside (0,1).
  double log_bump(double tau) const;
  double integrate_bump(double a, double b) const;

  GevreySpec spec_;
  double coeff_;     // g(tau) = coeff_ * (tau(1-tau))^(-power_)
  double power_;
  double peak_g_;    // g(1/2)
  double peak_width_;
  double half_mass_; // int_0^{1/2} w/w(1/2)
};

double phi(double t, const GevreySpec& spec);
DerivativeJet phi_jet(double t, const GevreySpec& spec, std::size_t order);

/// Fit |phi^(k+1)(t)| <= M (k!)^s / K^k, s = spec.gevrey_order(), over the
/// given jet samples: K from a log-domain least-squares line through the
/// per-order envelope, then the smallest M for which the bound holds at
/// every sample and order (equality is attained at least once).
GevreyBound gevrey_bound_fit(std::span<const DerivativeJet> samples, const GevreySpec& spec);

/// Convenience: sample `fn` on its bump-adapted grid up to `order` and fit.
GevreyBound fit_bound(const GevreyFunction& fn, std::size_t order);

}  // namespace zdiheat
