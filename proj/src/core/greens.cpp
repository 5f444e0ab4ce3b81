#include "zdiheat/greens.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "zdiheat/error.hpp"

namespace zdiheat {

double greens_eval(double x, double zeta, const BoundaryParams& bc) {
  const double k0 = bc.k0();
  const double k1 = bc.k1();
  const double lo = std::min(x, zeta);
  const double hi = std::max(x, zeta);
  return (k1 * hi - k1 - 1.0) * (k0 * lo + 1.0) / bc.gain();
}

struct InfluenceMatrix::Factor {
  Eigen::MatrixXd entries;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

InfluenceMatrix::InfluenceMatrix(ActuatorLayout layout, BoundaryParams bc)
    : layout_(std::move(layout)), bc_(bc), factor_(std::make_unique<Factor>()) {
  const auto m = static_cast<Eigen::Index>(layout_.size());
  factor_->entries.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      factor_->entries(i, j) = greens_eval(layout_[i], layout_[j], bc_);
    }
  }
  factor_->lu.compute(factor_->entries);
  const double rcond = factor_->lu.rcond();
  condition_ = rcond > 0.0 ? 1.0 / rcond : INFINITY;
  if (!(condition_ <= kNearSingularThreshold)) {
    fail(ErrorKind::kNearSingular,
         "influence matrix condition estimate " + format_number(condition_) + " exceeds 1e12");
  }
}

InfluenceMatrix::~InfluenceMatrix() = default;
InfluenceMatrix::InfluenceMatrix(InfluenceMatrix&&) noexcept = default;
InfluenceMatrix& InfluenceMatrix::operator=(InfluenceMatrix&&) noexcept = default;

InfluenceMatrix::InfluenceMatrix(const InfluenceMatrix& other)
    : layout_(other.layout_),
      bc_(other.bc_),
      factor_(std::make_unique<Factor>(*other.factor_)),
      condition_(other.condition_) {}

InfluenceMatrix& InfluenceMatrix::operator=(const InfluenceMatrix& other) {
  if (this != &other) {
    layout_ = other.layout_;
    bc_ = other.bc_;
    factor_ = std::make_unique<Factor>(*other.factor_);
    condition_ = other.condition_;
  }
  return *this;
}

double InfluenceMatrix::operator()(std::size_t i, std::size_t j) const {
  return factor_->entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

double InfluenceMatrix::determinant() const { return factor_->lu.determinant(); }

std::vector<double> InfluenceMatrix::solve(std::span<const double> rhs) const {
  require(rhs.size() == size(), "right-hand side length must equal the number of actuators");
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  const Eigen::VectorXd a = factor_->lu.solve(b);
  return {a.data(), a.data() + a.size()};
}

std::vector<double> InfluenceMatrix::apply(std::span<const double> a) const {
  require(a.size() == size(), "vector length must equal the number of actuators");
  const Eigen::Map<const Eigen::VectorXd> v(a.data(), static_cast<Eigen::Index>(a.size()));
  const Eigen::VectorXd r = factor_->entries * v;
  return {r.data(), r.data() + r.size()};
}

InfluenceMatrix influence_matrix(const ActuatorLayout& layout, const BoundaryParams& bc) {
  return InfluenceMatrix(layout, bc);
}

SteadyPlan static_plan(std::span<const double> target, const InfluenceMatrix& matrix) {
  require(target.size() == matrix.size(), "target needs one value per actuator");
  for (double v : target) require(std::isfinite(v), "target values must be finite");
  SteadyPlan plan;
  plan.target.assign(target.begin(), target.end());
  plan.alpha_bar = matrix.solve(target);
  const double gain = matrix.bc().gain();
  plan.ybar.resize(plan.alpha_bar.size());
  for (std::size_t j = 0; j < plan.alpha_bar.size(); ++j) {
    plan.alpha_bar[j] = -plan.alpha_bar[j];
    plan.ybar[j] = -plan.alpha_bar[j] / gain;
  }
  return plan;
}

SteadyPlan static_plan(std::span<const double> target, const ActuatorLayout& layout,
                       const BoundaryParams& bc) {
  return static_plan(target, InfluenceMatrix(layout, bc));
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  require(knots_.size() >= 2 && knots_.size() == values_.size(),
          "piecewise-linear function needs matching knots and values");
}

double PiecewiseLinear::operator()(double x) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  i = std::clamp<std::size_t>(i, 1, knots_.size() - 1);
  const double x0 = knots_[i - 1];
  const double x1 = knots_[i];
  const double s = (x - x0) / (x1 - x0);
  return values_[i - 1] + s * (values_[i] - values_[i - 1]);
}

PiecewiseLinear steady_state_oracle(const ActuatorLayout& layout, std::span<const double> alpha_bar,
                                    const BoundaryParams& bc) {
  require(alpha_bar.size() == layout.size(), "alpha_bar needs one value per actuator");
  const std::size_t m = layout.size();
  // z = c (1 + k0 x) + p(x), where p(0) = p'(0) = 0 and p' drops by abar_j at x_j.
  std::vector<double> knots{0.0};
  std::vector<double> particular{0.0};
  double slope = 0.0;
  double x_prev = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    particular.push_back(particular.back() + slope * (layout[j] - x_prev));
    knots.push_back(layout[j]);
    slope -= alpha_bar[j];
    x_prev = layout[j];
  }
  particular.push_back(particular.back() + slope * (1.0 - x_prev));
  knots.push_back(1.0);
  // Robin at 1: c (k0 + k1 (1 + k0)) + p'(1) + k1 p(1) = 0.
  const double c = -(slope + bc.k1() * particular.back()) / bc.gain();
  std::vector<double> values(knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    values[i] = c * (1.0 + bc.k0() * knots[i]) + particular[i];
  }
  return PiecewiseLinear(std::move(knots), std::move(values));
}

double steady_xi_factor(double xj, const BoundaryParams& bc) {
  return (bc.k0() * xj + 1.0) * (bc.k1() * (xj - 1.0) - 1.0);
}

double gamma_weight(double x, std::size_t j, const ActuatorLayout& layout, const BoundaryParams& bc,
                    GammaForm form) {
  require(j < layout.size(), "actuator index out of range");
  const double xj = layout[j];
  const double g = greens_eval(x, xj, bc);
  if (form == GammaForm::kPrinted) {
    return -bc.gain() * g / ((bc.k0() * xj + 1.0) * (bc.k0() * (xj - 1.0) - 1.0));
  }
  return bc.gain() * g / steady_xi_factor(xj, bc);
}

}  // namespace zdiheat
