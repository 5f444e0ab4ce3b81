#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "zdiheat/gevrey.hpp"
#include "zdiheat/greens.hpp"
#include "zdiheat/types.hpp"

namespace zdiheat {

inline constexpr double kDefaultSeriesTolerance = 1.0e-10;
// Highest derivative order used to fit (M, K) for truncation planning.
inline constexpr std::size_t kBoundFitOrder = 40;

/// Truncation of the flatness series: terms n = 0..achieved_order are summed.
struct SeriesTruncation {
  std::size_t max_order = kMaxJetOrder - 1;
  double tolerance = kDefaultSeriesTolerance;
  std::size_t achieved_order = 0;
  double tail_estimate = 0.0;
};

/// Scans B_n = M 2^n (n!)^s / ((2n)! K^n) in log space and returns the
/// smallest N for which the geometric tail prefactor * sum_{n > N} B_n is at
/// most `tolerance`.
///
/// Errors: DivergentSeries for s > 2 or s = 2 with 2K <= 1;
/// TruncationFailure if N would exceed max_order.
SeriesTruncation plan_truncation(double gevrey_order, const GevreyBound& bound, double tolerance,
                                 std::size_t max_order = kMaxJetOrder - 1, double prefactor = 1.0);
SeriesTruncation plan_truncation(const GevreySpec& spec, const GevreyBound& bound, double tolerance,
                                 std::size_t max_order = kMaxJetOrder - 1, double prefactor = 1.0);

/// Zero dynamics of actuator j driven by the flat output y_j = ybar * phi.
class ZdiState {
 public:
  ZdiState(std::size_t index, double position, BoundaryParams bc, double ybar,
           std::shared_ptr<const GevreyFunction> basis);

  std::size_t index() const noexcept { return index_; }
  double position() const noexcept { return position_; }
  const BoundaryParams& bc() const noexcept { return bc_; }
  double ybar() const noexcept { return ybar_; }
  const GevreyFunction& basis() const noexcept { return *basis_; }

  DerivativeJet flat_jet(double t, std::size_t order) const;

  /// Bounds every series term of xi and u by prefactor * B_n.
  double series_prefactor(const GevreyBound& bound) const;

 private:
  std::size_t index_;
  double position_;
  BoundaryParams bc_;
  double ybar_;
  std::shared_ptr<const GevreyFunction> basis_;
};

/// Fits (M, K) for the basis and plans the truncation for this state.
SeriesTruncation plan_truncation(const ZdiState& state, const GevreyBound& bound,
                                 double tolerance = kDefaultSeriesTolerance,
                                 std::size_t max_order = kMaxJetOrder - 1);

enum class Branch { kAuto, kLeft, kRight };

/// xi^j(x, t) from the truncated double series; kAuto takes the left branch
/// for x < x_j and the right one otherwise.
double xi_eval(double x, double t, const ZdiState& state, const SeriesTruncation& trunc,
               Branch branch = Branch::kAuto);

/// Same series from an explicit flat-output jet (order >= achieved_order).
double xi_series(double x, double xj, const BoundaryParams& bc, const DerivativeJet& jet,
                 const SeriesTruncation& trunc, Branch branch = Branch::kAuto);

/// u_j(t) = [xi_x]_{x_j}; needs the jet to order achieved_order + 1.
double control_signal(double t, const ZdiState& state, const SeriesTruncation& trunc);
double control_series(const BoundaryParams& bc, const DerivativeJet& jet,
                      const SeriesTruncation& trunc);

/// |left branch - right branch| of xi at x = x_j.
double continuity_check(const ZdiState& state, const SeriesTruncation& trunc, double t);

/// z^D(x, t) = sum_j gamma_j(x, x_j) xi^j(x_j, t).
double reference_profile(double x, double t, const SteadyPlan& plan,
                         std::span<const ZdiState> states,
                         std::span<const SeriesTruncation> truncations,
                         GammaForm form = GammaForm::kDerived);

/// z^d_j(t) = xi^j(x_j, t) for every actuator, for batch evaluation of z^D.
std::vector<double> zero_dynamics_outputs(double t, std::span<const ZdiState> states,
                                          std::span<const SeriesTruncation> truncations);

}  // namespace zdiheat
