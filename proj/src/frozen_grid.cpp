#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "kolmofix/error.hpp"
#include "kolmofix/frozen.hpp"

namespace kolmofix {
namespace {

// Bernoulli function t / (e^t - 1).
double bernoulli(double t) {
  if (std::abs(t) < 1e-8) return 1.0 - 0.5 * t;
  return t / std::expm1(t);
}

// Zero flux through every face: rho_R / rho_L = cL / cR, which is e^P for the
// exponentially fitted flux. Accumulated in log space so the density stays
// positive across any dynamic range.
std::vector<double> chain_1d(const std::vector<double>& log_ratio) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> L(log_ratio.size() + 1, 0.0);
  for (std::size_t f = 0; f < log_ratio.size(); ++f) {
    const double r = log_ratio[f];
    if (r == inf) {
      for (std::size_t k = 0; k <= f; ++k) L[k] = -inf;
      L[f + 1] = 0.0;
    } else {
      L[f + 1] = L[f] + r;
    }
  }
  double top = -inf;
  for (double v : L) top = std::max(top, v);
  std::vector<double> rho(L.size());
  for (std::size_t k = 0; k < L.size(); ++k) rho[k] = std::exp(L[k] - top);
  return rho;
}

}  // namespace

GridDensity solve_grid_fv(const FrozenCoefficients& coeffs, const std::vector<Axis>& axes) {
  const int d = coeffs.dim();
  if (d != 1 && d != 2) throw SolverError("finite-volume backend supports d = 1 or d = 2");
  if (static_cast<int>(axes.size()) != d) throw SolverError("grid axes do not match the problem dimension");
  if (!coeffs.diagonal()) {
    throw SolverError("finite-volume backend needs a diagonal diffusion matrix; use the particle backend");
  }
  const int n0 = axes[0].cells;
  const int n1 = d == 2 ? axes[1].cells : 1;
  const std::size_t cells = static_cast<std::size_t>(n0) * static_cast<std::size_t>(n1);
  const double R = coeffs.radius();

  auto center = [&](int i, int j, double* x) {
    x[0] = axes[0].center(i);
    if (d == 2) x[1] = axes[1].center(j);
  };
  std::vector<long> unknown(cells, -1);
  std::vector<std::array<double, 2>> diff(cells);
  long count = 0;
  std::array<double, 4> a{};
  std::array<double, 2> b{};
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const std::size_t c = static_cast<std::size_t>(i) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(j);
      std::array<double, 2> x{};
      center(i, j, x.data());
      const double r = std::sqrt(x[0] * x[0] + (d == 2 ? x[1] * x[1] : 0.0));
      if (!(r < R)) continue;
      coeffs.at(x.data(), a.data(), b.data());
      for (int k = 0; k < d; ++k) {
        const double akk = a[static_cast<std::size_t>(k * d + k)];
        if (akk < -1e-10) {
          std::ostringstream os;
          os << "negative diffusion " << akk << " at x = (" << x[0] << (d == 2 ? ", " + std::to_string(x[1]) : "") << ")";
          throw SolverError(os.str());
        }
        diff[c][static_cast<std::size_t>(k)] = std::max(akk, 0.0);
      }
      unknown[c] = count++;
    }
  }
  if (count == 0) throw SolverError("no active cells inside the domain");

  if (d == 1) {
    std::vector<std::size_t> active;
    for (std::size_t c = 0; c < cells; ++c) {
      if (unknown[c] >= 0) active.push_back(c);
    }
    const double h = axes[0].width();
    std::vector<double> log_ratio;
    for (std::size_t k = 0; k + 1 < active.size(); ++k) {
      const std::size_t cl = active[k];
      const std::size_t cr = active[k + 1];
      const double xf = axes[0].lower + static_cast<double>(cr) * h;
      coeffs.at(&xf, a.data(), b.data());
      const double aL = diff[cl][0];
      const double aR = diff[cr][0];
      const double D = 0.5 * (aL + aR);
      const double v = b[0] - (aR - aL) / h;
      if (!std::isfinite(v)) throw SolverError("drift is not finite at a cell face");
      double r = 0.0;
      if (D > 0.0) {
        r = v * h / D;
      } else if (v > 0.0) {
        r = std::numeric_limits<double>::infinity();
      } else if (v < 0.0) {
        r = -std::numeric_limits<double>::infinity();
      }
      log_ratio.push_back(r);
    }
    const std::vector<double> rho = chain_1d(log_ratio);
    std::vector<double> values(cells, 0.0);
    for (std::size_t k = 0; k < active.size(); ++k) values[active[k]] = rho[k];
    const double scale = 1.0 / (reduce_sum(values) * h);
    for (double& v : values) v *= scale;
    return GridDensity(axes, std::move(values));
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(count) * 5);
  auto face = [&](std::size_t cl, std::size_t cr, int k, const double* xf) {
    const long L = unknown[cl];
    const long Rr = unknown[cr];
    if (L < 0 || Rr < 0) return;
    const double h = axes[static_cast<std::size_t>(k)].width();
    const double aL = diff[cl][static_cast<std::size_t>(k)];
    const double aR = diff[cr][static_cast<std::size_t>(k)];
    coeffs.at(xf, a.data(), b.data());
    const double D = 0.5 * (aL + aR);
    const double v = b[static_cast<std::size_t>(k)] - (aR - aL) / h;
    double cL = 0.0;
    double cR = 0.0;
    if (D > 0.0) {
      const double P = v * h / D;
      cL = D / h * bernoulli(-P);
      cR = D / h * bernoulli(P);
    } else {
      cL = std::max(v, 0.0);
      cR = std::max(-v, 0.0);
    }
    // Flux L -> R is cL rho_L - cR rho_R.
    trips.emplace_back(L, L, cL);
    trips.emplace_back(L, Rr, -cR);
    trips.emplace_back(Rr, L, -cL);
    trips.emplace_back(Rr, Rr, cR);
  };
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const std::size_t c = static_cast<std::size_t>(i) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(j);
      std::array<double, 2> xf{};
      if (i + 1 < n0) {
        center(i, j, xf.data());
        xf[0] = axes[0].lower + (i + 1) * axes[0].width();
        face(c, c + static_cast<std::size_t>(n1), 0, xf.data());
      }
      if (d == 2 && j + 1 < n1) {
        center(i, j, xf.data());
        xf[1] = axes[1].lower + (j + 1) * axes[1].width();
        face(c, c + 1, 1, xf.data());
      }
    }
  }
  double vol = 1.0;
  for (const Axis& ax : axes) vol *= ax.width();
  const long pivot = count / 2;
  std::vector<Eigen::Triplet<double>> kept;
  kept.reserve(trips.size() + static_cast<std::size_t>(count));
  for (const auto& t : trips) {
    if (t.row() != pivot) kept.push_back(t);
  }
  for (long u = 0; u < count; ++u) kept.emplace_back(pivot, u, vol);
  Eigen::SparseMatrix<double> M(count, count);
  M.setFromTriplets(kept.begin(), kept.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(count);
  rhs(pivot) = 1.0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(M);
  lu.factorize(M);
  if (lu.info() != Eigen::Success) throw SolverError("finite-volume system is singular: " + lu.lastErrorMessage());
  Eigen::VectorXd rho = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw SolverError("finite-volume solve failed");

  std::vector<double> values(cells, 0.0);
  double worst = 0.0;
  std::size_t worst_cell = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    if (unknown[c] < 0) continue;
    const double v = rho(unknown[c]);
    if (!std::isfinite(v)) throw SolverError("finite-volume solution is not finite");
    if (v < worst) {
      worst = v;
      worst_cell = c;
    }
    values[c] = std::max(v, 0.0);
  }
  if (worst < -1e-10) {
    std::ostringstream os;
    os << "finite-volume density reaches " << worst << " at cell " << worst_cell << " (below -1e-10)";
    throw SolverError(os.str());
  }
  const double scale = 1.0 / (reduce_sum(values) * vol);
  for (double& v : values) v *= scale;
  return GridDensity(axes, std::move(values));
}

}  // namespace kolmofix
