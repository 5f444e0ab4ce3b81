#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "zdiheat/types.hpp"

namespace zdiheat {

/// Green's function of w'' = delta(x - zeta) on (0,1) with
/// w'(0) - k0 w(0) = 0 and w'(1) + k1 w(1) = 0.
double greens_eval(double x, double zeta, const BoundaryParams& bc);

/// Matrix of Green's function samples G(x_i, x_j) together with its LU
/// factorization. Immutable once built.
class InfluenceMatrix {
 public:
  /// Raises NearSingular when the 1-norm condition estimate exceeds 1e12.
  InfluenceMatrix(ActuatorLayout layout, BoundaryParams bc);
  ~InfluenceMatrix();
  InfluenceMatrix(const InfluenceMatrix&);
  InfluenceMatrix& operator=(const InfluenceMatrix&);
  InfluenceMatrix(InfluenceMatrix&&) noexcept;
  InfluenceMatrix& operator=(InfluenceMatrix&&) noexcept;

  std::size_t size() const noexcept { return layout_.size(); }
  double operator()(std::size_t i, std::size_t j) const;
  const ActuatorLayout& layout() const noexcept { return layout_; }
  const BoundaryParams& bc() const noexcept { return bc_; }

  double condition_estimate() const noexcept { return condition_; }
  double determinant() const;

  /// Solves G a = rhs.
  std::vector<double> solve(std::span<const double> rhs) const;
  std::vector<double> apply(std::span<const double> a) const;

 private:
  struct Factor;
  ActuatorLayout layout_;
  BoundaryParams bc_;
  std::unique_ptr<Factor> factor_;
  double condition_ = 0.0;
};

inline constexpr double kNearSingularThreshold = 1.0e12;

InfluenceMatrix influence_matrix(const ActuatorLayout& layout, const BoundaryParams& bc);

/// Static source strengths and flat-output amplitudes that hold the
/// prescribed values at the actuator points in steady state.
struct SteadyPlan {
  std::vector<double> alpha_bar;
  std::vector<double> ybar;
  std::vector<double> target;
};

/// The steady state of z_t - z_xx = sum_j delta(x - x_j) abar_j is
/// z = -sum_j G(x, x_j) abar_j, so abar = -G^{-1} target and
/// ybar = -abar / (k0 k1 + k0 + k1).
SteadyPlan static_plan(std::span<const double> target, const InfluenceMatrix& matrix);
SteadyPlan static_plan(std::span<const double> target, const ActuatorLayout& layout,
                       const BoundaryParams& bc);

/// Continuous piecewise-linear function on [0,1].
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> knots, std::vector<double> values);
  double operator()(double x) const;
  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// Direct solution of -z'' = sum_j delta(x - x_j) abar_j with the Robin
/// conditions, built by a left-to-right sweep without the Green's function.
PiecewiseLinear steady_state_oracle(const ActuatorLayout& layout, std::span<const double> alpha_bar,
                                    const BoundaryParams& bc);

enum class GammaForm {
  kDerived,  // second denominator factor k1 (x_j - 1) - 1
  kPrinted,  // as printed: minus sign, k0 (x_j - 1) - 1
};

/// Weight of actuator j in the reference split z^D = sum_j gamma_j z^d_j.
double gamma_weight(double x, std::size_t j, const ActuatorLayout& layout, const BoundaryParams& bc,
                    GammaForm form = GammaForm::kDerived);

/// (k0 x_j + 1)(k1 (x_j - 1) - 1): steady value of the zero dynamics at x_j
/// per unit flat output.
double steady_xi_factor(double xj, const BoundaryParams& bc);

}  // namespace zdiheat
