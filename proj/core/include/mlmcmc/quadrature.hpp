// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

namespace mlmcmc {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7,15) integration of f over [a, b] by interval
/// bisection until the local Kronrod error estimate meets
/// abs_tol + rel_tol * |integral|. Interior break_points seed the initial
/// partition; narrow features (sharp posterior modes) must be announced this
/// way or they can fall between the nodes of a wide panel. Every segment is
/// bisected at least twice before its estimate may be accepted. Throws
/// std::runtime_error when the depth budget is exhausted before converging.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-10, double abs_tol = 0.0,
                                    int max_depth = 48,
                                    const std::vector<double>& break_points = {});

}  // namespace mlmcmc
