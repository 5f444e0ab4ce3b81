#pragma once

#include <functional>

namespace zdiheat {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature: the panel with the
/// largest error estimate is bisected until the summed estimate drops below
/// abs_tol or max_intervals is reached.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, int max_intervals = 2000);

}  // namespace zdiheat
