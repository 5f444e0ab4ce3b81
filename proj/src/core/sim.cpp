#include "zdiheat/sim.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "zdiheat/error.hpp"

namespace zdiheat {
namespace {

constexpr double kBlowUp = 1.0e12;

struct Tridiagonal {
  std::vector<double> lower, diag, upper;
};

// Second-difference operator with the Robin conditions folded in through
// centred ghost nodes.
Tridiagonal robin_laplacian(std::size_t n, double dx, const BoundaryParams& bc) {
  Tridiagonal a{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                std::vector<double>(n, 0.0)};
  const double inv = 1.0 / (dx * dx);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    a.lower[i] = inv;
    a.diag[i] = -2.0 * inv;
    a.upper[i] = inv;
  }
  a.diag[0] = (-2.0 - 2.0 * dx * bc.k0()) * inv;
  a.upper[0] = 2.0 * inv;
  a.lower[n - 1] = 2.0 * inv;
  a.diag[n - 1] = (-2.0 - 2.0 * dx * bc.k1()) * inv;
  return a;
}

// Thomas algorithm with the elimination done once for a fixed matrix.
class TridiagonalSolver {
 public:
  TridiagonalSolver(const Tridiagonal& a, double scale) : lower_(a.lower.size()) {
    const std::size_t n = a.diag.size();
    upper_.resize(n);
    pivot_.resize(n);
    // I - scale * A
    for (std::size_t i = 0; i < n; ++i) lower_[i] = -scale * a.lower[i];
    double prev_upper = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = 1.0 - scale * a.diag[i];
      pivot_[i] = d - (i > 0 ? lower_[i] * prev_upper : 0.0);
      upper_[i] = -scale * a.upper[i] / pivot_[i];
      prev_upper = upper_[i];
    }
  }

  void solve(std::vector<double>& rhs) const {
    const std::size_t n = rhs.size();
    rhs[0] /= pivot_[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) / pivot_[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= upper_[i] * rhs[i + 1];
  }

 private:
  std::vector<double> lower_, upper_, pivot_;
};

void apply_explicit(const Tridiagonal& a, double scale, const std::vector<double>& z,
                    std::vector<double>& out) {
  const std::size_t n = z.size();
  for (std::size_t i = 0; i < n; ++i) {
    double az = a.diag[i] * z[i];
    if (i > 0) az += a.lower[i] * z[i - 1];
    if (i + 1 < n) az += a.upper[i] * z[i + 1];
    out[i] = z[i] + scale * az;
  }
}

// Fills the nodal source vector at time t.
using SourceFn = std::function<void(double t, std::vector<double>& s)>;

void integrate(SimTrajectory& traj, const BoundaryParams& bc, const SourceFn& source,
               const InitialFn& initial, const SolverOptions& options) {
  const SpaceTimeGrid& grid = traj.grid();
  require(options.substeps >= 1, "solver needs at least one substep per output interval");
  const std::size_t n = grid.nx();
  const double dx = grid.dx();
  const double h = grid.dt() / static_cast<double>(options.substeps);
  const Tridiagonal a = robin_laplacian(n, dx, bc);
  const bool cn = options.scheme == TimeScheme::kCrankNicolson;
  // CN and the startup half-steps share I - (h/2) A.
  const TridiagonalSolver half(a, 0.5 * h);
  const TridiagonalSolver full(a, h);

  std::vector<double> z(n), rhs(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = initial(grid.x(i));
    require(std::isfinite(z[i]), "initial condition must be finite");
    traj.z(0, i) = z[i];
  }

  auto backward_euler = [&](double t_new, double step, const TridiagonalSolver& solver) {
    source(t_new, s);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = z[i] + step * s[i];
    solver.solve(rhs);
    z.swap(rhs);
  };

  std::size_t step_index = 0;
  for (std::size_t k = 1; k < grid.nt(); ++k) {
    const double t0 = grid.t(k - 1);
    for (std::size_t sub = 0; sub < options.substeps; ++sub, ++step_index) {
      const double ta = t0 + static_cast<double>(sub) * h;
      if (!cn) {
        backward_euler(ta + h, h, full);
      } else if (step_index < options.startup_steps) {
        backward_euler(ta + 0.5 * h, 0.5 * h, half);
        backward_euler(ta + h, 0.5 * h, half);
      } else {
        source(ta + 0.5 * h, s);
        apply_explicit(a, 0.5 * h, z, rhs);
        for (std::size_t i = 0; i < n; ++i) rhs[i] += h * s[i];
        half.solve(rhs);
        z.swap(rhs);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(std::abs(z[i]) <= kBlowUp)) {
        fail(ErrorKind::kUnstableStep, "field magnitude exceeds 1e12 at t=" +
                                           format_number(grid.t(k)) + ", x=" +
                                           format_number(grid.x(i)));
      }
      traj.z(k, i) = z[i];
    }
  }
}

void record_controls(SimTrajectory& traj, const ControlFn& control) {
  std::vector<double> values(traj.actuators());
  for (std::size_t k = 0; k < traj.grid().nt(); ++k) {
    control(traj.grid().t(k), values);
    for (std::size_t j = 0; j < values.size(); ++j) traj.control(k, j) = values[j];
  }
}

// Trapezoid weight of node i.
double node_weight(std::size_t i, std::size_t n, double dx) {
  return (i == 0 || i + 1 == n) ? 0.5 * dx : dx;
}

}  // namespace

SpaceTimeGrid::SpaceTimeGrid(std::size_t nx, std::size_t nt, double t_end)
    : nx_(nx), nt_(nt), t_end_(t_end) {
  require(nx >= 16, "grid needs nx >= 16");
  require(nt >= 2, "grid needs nt >= 2");
  require(std::isfinite(t_end) && t_end > 0.0, "grid needs t_end > 0");
}

const char* to_string(Formulation f) noexcept {
  return f == Formulation::kDeltaSource ? "delta-source" : "flux-jump";
}

SimTrajectory::SimTrajectory(SpaceTimeGrid grid, Formulation formulation, std::size_t actuators)
    : grid_(grid),
      formulation_(formulation),
      actuators_(actuators),
      field_(grid.nx() * grid.nt(), 0.0),
      controls_(grid.nt() * actuators, 0.0),
      snaps_(actuators, 0.0) {}

double SimTrajectory::sample(std::size_t k, double x) const {
  const std::size_t n = grid_.nx();
  const double dx = grid_.dx();
  const auto zk = slice(k);
  const double pos = std::clamp(x, 0.0, 1.0) / dx;
  std::size_t left = std::min(static_cast<std::size_t>(pos), n - 2);
  const std::size_t right = left + 1;
  const double xl = grid_.x(left);
  const double xr = grid_.x(right);
  const double s = (x - xl) / dx;
  const double linear = zk[left] + s * (zk[right] - zk[left]);
  const auto kink = std::find_if(kinks_.begin(), kinks_.end(),
                                 [&](double xk) { return xk > xl && xk < xr; });
  if (kink == kinks_.end() || left == 0 || right + 1 >= n) return linear;
  const double from_left = zk[left] + (zk[left] - zk[left - 1]) * (x - xl) / dx;
  const double from_right = zk[right] - (zk[right + 1] - zk[right]) * (xr - x) / dx;
  if (x < *kink) return from_left;
  if (x > *kink) return from_right;
  return 0.5 * (from_left + from_right);
}

SimTrajectory simulate_delta(const SpaceTimeGrid& grid, const BoundaryParams& bc,
                             const ActuatorLayout& layout, const ControlFn& alpha,
                             const InitialFn& initial, const SolverOptions& options) {
  const std::size_t n = grid.nx();
  const std::size_t m = layout.size();
  const double dx = grid.dx();
  // Hat-function split of each delta over the two nodes of its cell, scaled
  // by the nodal trapezoid weights so the discrete source integrates to alpha_j.
  struct Split {
    std::size_t left;
    double w_left, w_right;
  };
  std::vector<Split> splits(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t left = std::min(static_cast<std::size_t>(layout[j] / dx), n - 2);
    const double frac = (layout[j] - grid.x(left)) / dx;
    splits[j] = {left, (1.0 - frac) / node_weight(left, n, dx), frac / node_weight(left + 1, n, dx)};
  }
  SimTrajectory traj(grid, Formulation::kDeltaSource, m);
  traj.set_kinks({layout.points().begin(), layout.points().end()});
  std::vector<double> values(m);
  auto source = [&](double t, std::vector<double>& s) {
    std::fill(s.begin(), s.end(), 0.0);
    alpha(t, values);
    for (std::size_t j = 0; j < m; ++j) {
      s[splits[j].left] += values[j] * splits[j].w_left;
      s[splits[j].left + 1] += values[j] * splits[j].w_right;
    }
  };
  integrate(traj, bc, source, initial, options);
  record_controls(traj, alpha);
  return traj;
}

SimTrajectory simulate_jump(const SpaceTimeGrid& grid, const BoundaryParams& bc,
                            const ActuatorLayout& layout, const ControlFn& u,
                            const InitialFn& initial, const SolverOptions& options) {
  const std::size_t n = grid.nx();
  const std::size_t m = layout.size();
  const double dx = grid.dx();
  std::vector<std::size_t> nodes(m);
  std::vector<double> snaps(m), kinks(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto node = static_cast<std::size_t>(std::lround(layout[j] / dx));
    nodes[j] = std::clamp<std::size_t>(node, 1, n - 2);
    kinks[j] = grid.x(nodes[j]);
    snaps[j] = std::abs(kinks[j] - layout[j]);
    if (snaps[j] > 0.5 * dx * (1.0 + 1e-12)) {
      fail(ErrorKind::kSnapTooLarge, "actuator " + std::to_string(j + 1) +
                                         " is farther than dx/2 from every interior node");
    }
    if (j > 0 && nodes[j] == nodes[j - 1]) {
      fail(ErrorKind::kSnapTooLarge, "actuators " + std::to_string(j) + " and " +
                                         std::to_string(j + 1) + " snap to the same node");
    }
  }
  SimTrajectory traj(grid, Formulation::kFluxJump, m);
  traj.set_kinks(std::move(kinks));
  traj.set_snap_distances(std::move(snaps));
  std::vector<double> values(m);
  // Half-cell balance at an interface node: the outer fluxes are the usual
  // differences and the inner ones differ by the prescribed jump, so the row
  // is the standard stencil minus u_j / dx.
  auto source = [&](double t, std::vector<double>& s) {
    std::fill(s.begin(), s.end(), 0.0);
    u(t, values);
    for (std::size_t j = 0; j < m; ++j) s[nodes[j]] -= values[j] / dx;
  };
  integrate(traj, bc, source, initial, options);
  record_controls(traj, u);
  return traj;
}

SimTrajectory simulate_forced(const SpaceTimeGrid& grid, const BoundaryParams& bc,
                              const ForcingFn& forcing, const InitialFn& initial,
                              const SolverOptions& options) {
  SimTrajectory traj(grid, Formulation::kDeltaSource, 0);
  auto source = [&](double t, std::vector<double>& s) {
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = forcing(grid.x(i), t);
  };
  integrate(traj, bc, source, initial, options);
  return traj;
}

double discrete_energy(const SimTrajectory& traj, std::size_t k) {
  const auto z = traj.slice(k);
  const std::size_t n = z.size();
  const double dx = traj.grid().dx();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) e += node_weight(i, n, dx) * z[i] * z[i];
  return e;
}

double ErrorTrace::max_abs(std::size_t k) const {
  double v = 0.0;
  for (std::size_t i = 0; i < m; ++i) v = std::max(v, std::abs(e(k, i)));
  return v;
}

ErrorTrace regulation_errors(const SimTrajectory& traj, const ActuatorLayout& layout,
                             const ReferenceFn& reference) {
  const SpaceTimeGrid& grid = traj.grid();
  ErrorTrace trace;
  trace.nt = grid.nt();
  trace.m = layout.size();
  trace.nx = grid.nx();
  trace.times.resize(trace.nt);
  trace.actuator.resize(trace.nt * trace.m);
  trace.reference_at_actuators.resize(trace.nt * trace.m);
  trace.tracking.resize(trace.nt * trace.nx);
  std::vector<double> xs(grid.nx());
  for (std::size_t i = 0; i < grid.nx(); ++i) xs[i] = grid.x(i);
  std::vector<double> ref_grid(grid.nx()), ref_act(trace.m);
  for (std::size_t k = 0; k < trace.nt; ++k) {
    const double t = grid.t(k);
    trace.times[k] = t;
    reference(t, layout.points(), ref_act);
    reference(t, xs, ref_grid);
    for (std::size_t i = 0; i < trace.m; ++i) {
      trace.reference_at_actuators[k * trace.m + i] = ref_act[i];
      trace.actuator[k * trace.m + i] = traj.sample(k, layout[i]) - ref_act[i];
    }
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      trace.tracking[k * trace.nx + i] = traj.z(k, i) - ref_grid[i];
    }
  }
  return trace;
}

ManufacturedSolution robin_mode_solution(const BoundaryParams& bc, double omega, double phase) {
  const double k0 = bc.k0();
  const double k1 = bc.k1();
  // q = cos(mu x) + (k0/mu) sin(mu x) meets the condition at 0 for every mu;
  // mu is the first root of (k0 + k1) cos mu + (k0 k1 / mu - mu) sin mu.
  auto residual = [&](double mu) {
    return (k0 + k1) * std::cos(mu) + (k0 * k1 / mu - mu) * std::sin(mu);
  };
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iterations = 200;
  const auto bracket = boost::math::tools::toms748_solve(residual, 1e-9, std::numbers::pi, tol,
                                                         iterations);
  const double mu = 0.5 * (bracket.first + bracket.second);
  auto q = [=](double x) { return std::cos(mu * x) + (k0 / mu) * std::sin(mu * x); };
  ManufacturedSolution sol;
  sol.z = [=](double x, double t) { return std::sin(omega * t + phase) * q(x); };
  sol.forcing = [=](double x, double t) {
    return (omega * std::cos(omega * t + phase) + mu * mu * std::sin(omega * t + phase)) * q(x);
  };
  return sol;
}

namespace {

double max_error_at_end(const SimTrajectory& traj, const std::function<double(double, double)>& z) {
  const std::size_t k = traj.grid().nt() - 1;
  double e = 0.0;
  for (std::size_t i = 0; i < traj.grid().nx(); ++i) {
    e = std::max(e, std::abs(traj.z(k, i) - z(traj.grid().x(i), traj.grid().t(k))));
  }
  return e;
}

// Max difference at the end time between two runs on nested grids (the
// coarse nodes are every `stride`-th fine node).
double level_difference(const SimTrajectory& coarse, const SimTrajectory& fine, std::size_t stride) {
  const std::size_t kc = coarse.grid().nt() - 1;
  const std::size_t kf = fine.grid().nt() - 1;
  double d = 0.0;
  for (std::size_t i = 0; i < coarse.grid().nx(); ++i) {
    d = std::max(d, std::abs(coarse.z(kc, i) - fine.z(kf, i * stride)));
  }
  return d;
}

double rate(double coarse_diff, double fine_diff) {
  if (coarse_diff == 0.0 && fine_diff == 0.0) return 0.0;
  return std::log2(coarse_diff / fine_diff);
}

}  // namespace

AccuracyReport order_of_accuracy(const ManufacturedSolution& solution, const BoundaryParams& bc,
                                 TimeScheme scheme) {
  const double t_end = 0.5;
  auto initial = [&](double x) { return solution.z(x, 0.0); };
  AccuracyReport report;

  // Space: nx = 21, 41, 81 with a time step far below the spatial error.
  std::vector<SimTrajectory> space;
  for (std::size_t level = 0; level < 3; ++level) {
    const std::size_t nx = 20 * (std::size_t{1} << level) + 1;
    SolverOptions opt;
    opt.scheme = TimeScheme::kCrankNicolson;
    opt.substeps = 400;
    space.push_back(simulate_forced(SpaceTimeGrid(nx, 6, t_end), bc, solution.forcing, initial, opt));
    report.spatial_errors.push_back(max_error_at_end(space.back(), solution.z));
  }
  report.spatial_order =
      rate(level_difference(space[0], space[1], 2), level_difference(space[1], space[2], 2));

  // Time: fixed fine mesh, steps t_end/10, /20, /40.
  std::vector<SimTrajectory> time;
  for (std::size_t level = 0; level < 3; ++level) {
    SolverOptions opt;
    opt.scheme = scheme;
    opt.substeps = std::size_t{1} << level;
    time.push_back(simulate_forced(SpaceTimeGrid(201, 11, t_end), bc, solution.forcing, initial, opt));
    report.temporal_errors.push_back(max_error_at_end(time.back(), solution.z));
  }
  report.temporal_order =
      rate(level_difference(time[0], time[1], 1), level_difference(time[1], time[2], 1));
  return report;
}

}  // namespace zdiheat
