#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "zdiheat/types.hpp"

namespace zdiheat {

/// Uniform grid on [0,1] x [0, t_end]: nx nodes in space, nt output times.
class SpaceTimeGrid {
 public:
  SpaceTimeGrid(std::size_t nx, std::size_t nt, double t_end);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t nt() const noexcept { return nt_; }
  double t_end() const noexcept { return t_end_; }
  double dx() const noexcept { return 1.0 / static_cast<double>(nx_ - 1); }
  double dt() const noexcept { return t_end_ / static_cast<double>(nt_ - 1); }
  double x(std::size_t i) const noexcept { return static_cast<double>(i) * dx(); }
  double t(std::size_t k) const noexcept { return static_cast<double>(k) * dt(); }

 private:
  std::size_t nx_;
  std::size_t nt_;
  double t_end_;
};

enum class Formulation { kDeltaSource, kFluxJump };
const char* to_string(Formulation f) noexcept;

enum class TimeScheme {
  kCrankNicolson,  // with backward-Euler half-steps at startup
  kBackwardEuler,  // first order, for verification only
};

struct SolverOptions {
  // Internal steps per output interval.
  std::size_t substeps = 20;
  TimeScheme scheme = TimeScheme::kCrankNicolson;
  // Leading CN steps each replaced by two backward-Euler half-steps.
  std::size_t startup_steps = 2;
};

/// Fills one value per actuator at time t.
using ControlFn = std::function<void(double t, std::span<double> out)>;
using InitialFn = std::function<double(double x)>;
/// Distributed forcing f(x, t).
using ForcingFn = std::function<double(double x, double t)>;

class SimTrajectory {
 public:
  SimTrajectory(SpaceTimeGrid grid, Formulation formulation, std::size_t actuators);

  const SpaceTimeGrid& grid() const noexcept { return grid_; }
  Formulation formulation() const noexcept { return formulation_; }
  std::size_t actuators() const noexcept { return actuators_; }

  double z(std::size_t k, std::size_t i) const { return field_[k * grid_.nx() + i]; }
  double& z(std::size_t k, std::size_t i) { return field_[k * grid_.nx() + i]; }
  std::span<const double> slice(std::size_t k) const {
    return {field_.data() + k * grid_.nx(), grid_.nx()};
  }
  /// Control applied at output time t_k: alpha for delta-source runs, u for flux-jump runs.
  double control(std::size_t k, std::size_t j) const { return controls_[k * actuators_ + j]; }
  double& control(std::size_t k, std::size_t j) { return controls_[k * actuators_ + j]; }

  /// Points where the field has a slope kink (actuator positions as used by the solver).
  std::span<const double> kinks() const noexcept { return kinks_; }
  void set_kinks(std::vector<double> kinks) { kinks_ = std::move(kinks); }
  /// Per-actuator |snapped node - x_j| (flux-jump runs; zeros otherwise).
  std::span<const double> snap_distances() const noexcept { return snaps_; }
  void set_snap_distances(std::vector<double> snaps) { snaps_ = std::move(snaps); }

  /// Field at time index k and arbitrary x. Inside a cell that holds a kink,
  /// each side is extrapolated linearly from its own neighbours, which is
  /// exact for piecewise-linear profiles; elsewhere linear interpolation.
  double sample(std::size_t k, double x) const;

 private:
  SpaceTimeGrid grid_;
  Formulation formulation_;
  std::size_t actuators_;
  std::vector<double> field_;
  std::vector<double> controls_;
  std::vector<double> kinks_;
  std::vector<double> snaps_;
};

/// z_t - z_xx = sum_j delta(x - x_j) alpha_j(t) with the Robin conditions.
SimTrajectory simulate_delta(const SpaceTimeGrid& grid, const BoundaryParams& bc,
                             const ActuatorLayout& layout, const ControlFn& alpha,
                             const InitialFn& initial, const SolverOptions& options = {});

/// z_t - z_xx = 0 away from the actuators, continuity and [z_x]_{x_j} = u_j(t)
/// at each x_j. Each x_j is snapped to its nearest node.
SimTrajectory simulate_jump(const SpaceTimeGrid& grid, const BoundaryParams& bc,
                            const ActuatorLayout& layout, const ControlFn& u,
                            const InitialFn& initial, const SolverOptions& options = {});

/// z_t - z_xx = f(x, t) with the Robin conditions (solver verification).
SimTrajectory simulate_forced(const SpaceTimeGrid& grid, const BoundaryParams& bc,
                              const ForcingFn& forcing, const InitialFn& initial,
                              const SolverOptions& options = {});

/// Trapezoidal approximation of int_0^1 z(x, t_k)^2 dx.
double discrete_energy(const SimTrajectory& traj, std::size_t k);

/// Reference field sampled at the given points at time t.
using ReferenceFn = std::function<void(double t, std::span<const double> xs, std::span<double> out)>;

struct ErrorTrace {
  std::size_t nt = 0;
  std::size_t m = 0;
  std::size_t nx = 0;
  std::vector<double> times;
  std::vector<double> actuator;  // nt x m: e_i(t_k)
  std::vector<double> tracking;  // nt x nx: z - z^D on the grid
  std::vector<double> reference_at_actuators;  // nt x m: z^D(x_i, t_k)

  double e(std::size_t k, std::size_t i) const { return actuator[k * m + i]; }
  double max_abs(std::size_t k) const;
};

ErrorTrace regulation_errors(const SimTrajectory& traj, const ActuatorLayout& layout,
                             const ReferenceFn& reference);

/// Smooth solution of the homogeneous Robin problem used to verify the solver.
struct ManufacturedSolution {
  std::function<double(double x, double t)> z;
  std::function<double(double x, double t)> forcing;  // z_t - z_xx
};

/// sin(omega t + phase) * q(x) with q the first Robin eigenfunction.
ManufacturedSolution robin_mode_solution(const BoundaryParams& bc, double omega = 2.0,
                                         double phase = 0.3);

struct AccuracyReport {
  double spatial_order = 0.0;
  double temporal_order = 0.0;
  std::vector<double> spatial_errors;   // max-norm error vs z at t_end per level
  std::vector<double> temporal_errors;
};

/// Observed orders from three refinement levels in each of space and time;
/// rates come from successive-difference (Richardson) ratios so the error
/// in the other variable cancels.
AccuracyReport order_of_accuracy(const ManufacturedSolution& solution, const BoundaryParams& bc,
                                 TimeScheme scheme = TimeScheme::kCrankNicolson);

}  // namespace zdiheat
