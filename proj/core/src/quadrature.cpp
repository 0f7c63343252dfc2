// SPDX-License-Identifier: Apache-2.0
#include "mlmcmc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlmcmc {

namespace {

// 15-point Kronrod nodes/weights on [-1,1] and the embedded 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct PanelResult {
  double kronrod;
  double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b, int& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  evals += 15;
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 7; ++i) kron += kWgk[i] * (fv[i] + fv[14 - i]);
  kron += kWgk[7] * fv[7];
  // Gauss-7 nodes are the odd-index Kronrod nodes.
  for (int i = 0; i < 3; ++i) gauss += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  gauss += kWg[3] * fv[7];
  kron *= h;
  gauss *= h;
  const double diff = std::fabs(kron - gauss);
  // QUADPACK-style sharpened error estimate.
  const double err = (diff > 0.0) ? diff * std::min(1.0, std::pow(200.0 * diff, 1.5)) : 0.0;
  return {kron, std::max(err, diff * 1e-8)};
}

double recurse(const std::function<double(double)>& f, double a, double b, double tol, int depth,
               int max_depth, int& evals) {
  const PanelResult p = gk15(f, a, b, evals);
  if (depth >= 2 && (p.error <= tol || p.error <= 1e-300)) return p.kronrod;
  if (depth >= max_depth)
    throw std::runtime_error("integrate_adaptive: interval subdivision did not converge");
  const double c = 0.5 * (a + b);
  return recurse(f, a, c, 0.5 * tol, depth + 1, max_depth, evals) +
         recurse(f, c, b, 0.5 * tol, depth + 1, max_depth, evals);
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, double abs_tol, int max_depth,
                                    const std::vector<double>& break_points) {
  if (!(b > a)) throw std::invalid_argument("integrate_adaptive: requires b > a");
  std::vector<double> edges{a};
  for (double p : break_points)
    if (p > a && p < b) edges.push_back(p);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  QuadratureResult out;
  // First pass fixes the tolerance scale from a coarse whole-domain estimate.
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    scale += gk15(f, edges[i], edges[i + 1], out.evaluations).kronrod;
  const double tol =
      abs_tol + rel_tol * std::max(std::fabs(scale), 1e-300);
  const double seg_tol = tol / static_cast<double>(edges.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    total += recurse(f, edges[i], edges[i + 1], seg_tol, 0, max_depth, out.evaluations);
  out.value = total;
  out.error_estimate = tol;
  return out;
}

}  // namespace mlmcmc
