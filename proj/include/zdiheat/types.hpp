#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace zdiheat {

/// Robin feedback gains of the boundary conditions
///   z_x(0,t) - k0 z(0,t) = 0,   z_x(1,t) + k1 z(1,t) = 0.
/// Requires k0 >= 0, k1 >= 0 and k0 + k1 > 0.
class BoundaryParams {
 public:
  BoundaryParams(double k0, double k1);

  double k0() const noexcept { return k0_; }
  double k1() const noexcept { return k1_; }
  /// k0*k1 + k0 + k1, the static gain between flat output and control.
  double gain() const noexcept { return k0_ * k1_ + k0_ + k1_; }

 private:
  double k0_;
  double k1_;
};

/// Interior actuation points 0 < x_1 < ... < x_m < 1.
class ActuatorLayout {
 public:
  explicit ActuatorLayout(std::vector<double> points);

  /// m points at j/(m+1), j = 1..m.
  static ActuatorLayout uniform(std::size_t m);

  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t j) const { return points_[j]; }
  std::span<const double> points() const noexcept { return points_; }

 private:
  std::vector<double> points_;
};

enum class BumpForm {
  // w(tau) = exp(-(tau(1-tau))^(-eps)), Gevrey order 1 + 1/eps.
  kStandard,
  // w(tau) = exp(-1/(tau(1-tau)))^eps = exp(-eps/(tau(1-tau))), Gevrey order 2.
  kPrinted,
};

const char* to_string(BumpForm form) noexcept;

/// Parameters of the smooth 0 -> 1 transition used as basic output.
class GevreySpec {
 public:
  GevreySpec(double sigma, double duration, BumpForm form = BumpForm::kStandard);

  double sigma() const noexcept { return sigma_; }
  double duration() const noexcept { return duration_; }
  BumpForm form() const noexcept { return form_; }
  double epsilon() const noexcept { return 1.0 / (sigma_ - 1.0); }

  /// Order of the Gevrey class the transition actually belongs to; this is
  /// what derivative bounds and series truncation are computed against.
  double gevrey_order() const noexcept {
    return form_ == BumpForm::kStandard ? sigma_ : 2.0;
  }

 private:
  double sigma_;
  double duration_;
  BumpForm form_;
};

/// Value and time derivatives y(t), y'(t), ..., y^(N)(t).
class DerivativeJet {
 public:
  explicit DerivativeJet(std::vector<double> coefficients);

  std::size_t order() const noexcept { return coefficients_.size() - 1; }
  double operator[](std::size_t n) const { return coefficients_[n]; }
  std::span<const double> coefficients() const noexcept { return coefficients_; }

  DerivativeJet scaled(double factor) const;

 private:
  std::vector<double> coefficients_;
};

/// |phi^(k+1)(t)| <= m * (k!)^order / k^k over the sampled times.
struct GevreyBound {
  double m = 0.0;
  double k = 1.0;
  double order = 1.0;
  std::size_t fitted_orders = 0;
};

/// Basic outputs y_j(t) = ybar_j * phi(t).
struct FlatOutput {
  std::vector<double> ybar;
  GevreySpec spec;
};

}  // namespace zdiheat
