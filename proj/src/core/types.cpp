#include "zdiheat/types.hpp"

#include <cmath>
#include <string>

#include "zdiheat/error.hpp"

namespace zdiheat {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kConfig: return "ConfigError";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kOverflowAtOrder: return "OverflowAtOrder";
    case ErrorKind::kInsufficientData: return "InsufficientData";
    case ErrorKind::kNearSingular: return "NearSingular";
    case ErrorKind::kTruncationFailure: return "TruncationFailure";
    case ErrorKind::kDivergentSeries: return "DivergentSeries";
    case ErrorKind::kUnstableStep: return "UnstableStep";
    case ErrorKind::kSnapTooLarge: return "SnapTooLarge";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) noexcept {
  return kind == ErrorKind::kInvalidArgument || kind == ErrorKind::kConfig ||
         kind == ErrorKind::kIo;
}

const char* to_string(BumpForm form) noexcept {
  return form == BumpForm::kStandard ? "standard" : "printed";
}

BoundaryParams::BoundaryParams(double k0, double k1) : k0_(k0), k1_(k1) {
  require(std::isfinite(k0) && std::isfinite(k1), "boundary gains must be finite");
  require(k0 >= 0.0 && k1 >= 0.0, "boundary gains must be nonnegative");
  require(k0 + k1 > 0.0, "boundary gains must satisfy k0 + k1 > 0");
}

ActuatorLayout::ActuatorLayout(std::vector<double> points) : points_(std::move(points)) {
  require(!points_.empty(), "actuator layout needs at least one point");
  for (std::size_t j = 0; j < points_.size(); ++j) {
    const double x = points_[j];
    require(std::isfinite(x) && x > 0.0 && x < 1.0,
            "actuator point " + std::to_string(j + 1) + " must lie in (0,1)");
    if (j > 0) {
      require(x > points_[j - 1],
              "actuator points must be strictly increasing (point " + std::to_string(j + 1) + ")");
    }
  }
}

ActuatorLayout ActuatorLayout::uniform(std::size_t m) {
  require(m >= 1, "uniform layout needs m >= 1");
  std::vector<double> points(m);
  for (std::size_t j = 0; j < m; ++j) {
    points[j] = static_cast<double>(j + 1) / static_cast<double>(m + 1);
  }
  return ActuatorLayout(std::move(points));
}

GevreySpec::GevreySpec(double sigma, double duration, BumpForm form)
    : sigma_(sigma), duration_(duration), form_(form) {
  require(std::isfinite(sigma) && sigma > 1.0, "Gevrey order sigma must exceed 1");
  if (sigma >= 2.0) {
    fail(ErrorKind::kDivergentSeries,
         "Gevrey order sigma = " + format_number(sigma) +
             " >= 2: flatness series are not guaranteed to converge");
  }
  require(std::isfinite(duration) && duration > 0.0, "transition duration T must be positive");
}

DerivativeJet::DerivativeJet(std::vector<double> coefficients)
    : coefficients_(std::move(coefficients)) {
  require(!coefficients_.empty(), "derivative jet needs at least the value entry");
  for (double c : coefficients_) require(std::isfinite(c), "derivative jet entries must be finite");
}

DerivativeJet DerivativeJet::scaled(double factor) const {
  std::vector<double> out(coefficients_);
  for (double& c : out) c *= factor;
  return DerivativeJet(std::move(out));
}

}  // namespace zdiheat
