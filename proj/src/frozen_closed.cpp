#include <cmath>
#include <sstream>

#include "kolmofix/error.hpp"
#include "kolmofix/frozen.hpp"

namespace kolmofix {

GridDensity solve_1d_closed(const FrozenCoefficients& coeffs, const Axis& axis, double tol) {
  if (coeffs.dim() != 1) throw SolverError("closed-form backend needs d = 1");
  const int n = axis.cells;
  const double R = coeffs.radius();
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> ratio(static_cast<std::size_t>(n));
  std::vector<double> log_a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(i);
    x[s] = axis.center(i);
    double a = 0.0;
    double b = 0.0;
    coeffs.at(&x[s], &a, &b);
    if (std::abs(x[s]) < R && a < tol) {
      std::ostringstream os;
      os << "diffusion a(x) = " << a << " is below " << tol << " at x = " << x[s]
         << "; the closed form needs a > 0, use the particle backend (solve_ergodic)";
      throw DegenerateCoefficientError(os.str());
    }
    ratio[s] = b / a;
    log_a[s] = std::log(a);
  }
  // Reference point: the centre closest to 0.
  int ref = 0;
  for (int i = 1; i < n; ++i) {
    if (std::abs(x[static_cast<std::size_t>(i)]) < std::abs(x[static_cast<std::size_t>(ref)])) ref = i;
  }
  std::vector<double> log_rho(static_cast<std::size_t>(n), 0.0);
  const double h = axis.width();
  for (int i = ref + 1; i < n; ++i) {
    const auto s = static_cast<std::size_t>(i);
    log_rho[s] = log_rho[s - 1] + 0.5 * h * (ratio[s - 1] + ratio[s]);
  }
  for (int i = ref - 1; i >= 0; --i) {
    const auto s = static_cast<std::size_t>(i);
    log_rho[s] = log_rho[s + 1] - 0.5 * h * (ratio[s + 1] + ratio[s]);
  }
  double top = -INFINITY;
  for (int i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(i);
    log_rho[s] -= log_a[s];
    if (std::abs(x[s]) < R) top = std::max(top, log_rho[s]);
  }
  std::vector<double> rho(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(i);
    rho[s] = std::abs(x[s]) < R ? std::exp(log_rho[s] - top) : 0.0;
  }
  const double scale = 1.0 / (reduce_sum(rho) * h);
  for (double& v : rho) v *= scale;
  return GridDensity({axis}, std::move(rho));
}

}  // namespace kolmofix
