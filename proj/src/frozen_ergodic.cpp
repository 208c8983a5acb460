#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "kolmofix/error.hpp"
#include "kolmofix/expr.hpp"
#include "kolmofix/frozen.hpp"
#include "kolmofix/simd/kernels.hpp"

namespace kolmofix {

void SdeConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("solver.dt must be positive");
  if (!(T > 0.0)) throw ConfigError("solver.T must be positive");
  if (!(burn_in >= 0.0 && burn_in < T)) throw ConfigError("solver.burn_in must lie in [0, T)");
  if (dt > T / 100.0) throw ConfigError("solver.dt must not exceed T/100");
  if (particles == 0) throw ConfigError("solver.particles must be positive");
  if (snapshots == 0) throw ConfigError("solver.snapshots must be positive");
  if (particles > 0xFFFFFFFFull) throw ConfigError("solver.particles exceeds the RNG counter range");
}

namespace {

constexpr std::size_t kBlock = Program::kBlock;

struct Plan {
  int d = 1;
  std::size_t particles = 0;
  std::uint64_t steps = 0;
  std::uint64_t burn_steps = 0;
  std::uint64_t stride = 1;
  std::size_t snapshots = 0;
};

std::string time_text(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

class BlockRunner {
 public:
  BlockRunner(const FrozenCoefficients& coeffs, const SdeConfig& cfg, const Plan& plan, double* out)
      : c_(coeffs), cfg_(cfg), plan_(plan), out_(out) {}

  void run(std::size_t first, std::size_t n, const std::vector<double>& start) {
    const int d = plan_.d;
    const simd::KernelTable& kt = simd::kernels();
    std::array<std::vector<double>, kMaxDim> x;
    std::array<std::vector<double>, kMaxDim> drift;
    std::array<std::vector<double>, kMaxDim> scale;
    std::array<std::vector<double>, kMaxDim> noise;
    std::array<std::vector<double>, kMaxDim * kMaxDim> diff;
    std::array<const double*, kMaxDim> xp{};
    std::array<double*, kMaxDim> bp{};
    std::array<double*, kMaxDim * kMaxDim> ap{};
    for (int i = 0; i < d; ++i) {
      const auto s = static_cast<std::size_t>(i);
      x[s].resize(n);
      drift[s].resize(n);
      scale[s].assign(n, 0.0);
      noise[s].resize(n);
      for (std::size_t p = 0; p < n; ++p) x[s][p] = start[(first + p) * static_cast<std::size_t>(d) + s];
      xp[s] = x[s].data();
      bp[s] = drift[s].data();
    }
    for (int k = 0; k < d * d; ++k) {
      diff[static_cast<std::size_t>(k)].resize(n);
      ap[static_cast<std::size_t>(k)] = diff[static_cast<std::size_t>(k)].data();
    }
    std::vector<double> spare0(n);
    std::vector<double> spare1(n);
    std::vector<double> mixed;
    const bool diagonal = c_.diagonal();
    const bool constant = c_.constant_diffusion();
    const double dt = cfg_.dt;
    const double sqrt_dt = std::sqrt(dt);
    const double R = c_.radius();
    const bool reflect = std::isfinite(R);
    bool scale_ready = false;
    std::size_t snap = 0;

    for (std::uint64_t step = 0; step < plan_.steps; ++step) {
      c_.block(xp.data(), n, ap.data(), bp.data());
      if (!scale_ready) {
        if (diagonal) {
          for (int i = 0; i < d; ++i) {
            const double* aii = diff[static_cast<std::size_t>(i * d + i)].data();
            double* s = scale[static_cast<std::size_t>(i)].data();
            for (std::size_t p = 0; p < n; ++p) {
              if (aii[p] < -1e-10) fail_psd(step, aii[p]);
              s[p] = std::sqrt(2.0 * std::max(aii[p], 0.0));
            }
          }
        }
        scale_ready = constant && diagonal;
      }
      draw_noise(step, first, n, noise, spare0, spare1);
      if (!diagonal) mix_noise(step, n, diff, noise, mixed);
      for (int i = 0; i < d; ++i) {
        const auto s = static_cast<std::size_t>(i);
        if (diagonal) {
          kt.euler_step(x[s].data(), drift[s].data(), scale[s].data(), noise[s].data(), dt, sqrt_dt, n);
        } else {
          std::fill(scale[s].begin(), scale[s].end(), 1.0);
          kt.euler_step(x[s].data(), drift[s].data(), scale[s].data(), noise[s].data(), dt, sqrt_dt, n);
        }
      }
      if (reflect) reflect_ball(x, n, R);
      check_guard(x, n, step);
      if (step + 1 > plan_.burn_steps && (step + 1 - plan_.burn_steps) % plan_.stride == 0 && snap < plan_.snapshots) {
        double* dst = out_ + (snap * plan_.particles + first) * static_cast<std::size_t>(d);
        for (std::size_t p = 0; p < n; ++p) {
          for (int i = 0; i < d; ++i) dst[p * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)][p];
        }
        ++snap;
      }
    }
  }

 private:
  [[noreturn]] void fail_psd(std::uint64_t step, double v) const {
    std::ostringstream os;
    os << "diffusion matrix is not positive semidefinite (eigenvalue " << v << ") at t = " << (step * cfg_.dt);
    throw SolverError(os.str());
  }

  void draw_noise(std::uint64_t step, std::size_t first, std::size_t n, std::array<std::vector<double>, kMaxDim>& noise,
                  std::vector<double>& spare0, std::vector<double>& spare1) const {
    const int d = plan_.d;
    const simd::KernelTable& kt = simd::kernels();
    const auto f = static_cast<std::uint32_t>(first);
    if (d == 1) {
      // One pair serves two consecutive steps.
      if (step % 2 == 0) {
        kt.normal_pairs(cfg_.seed, step / 2, 0, f, n, noise[0].data(), spare0.data());
      } else {
        std::copy(spare0.begin(), spare0.end(), noise[0].begin());
      }
      return;
    }
    for (int s = 0; 2 * s < d; ++s) {
      double* z1 = 2 * s + 1 < d ? noise[static_cast<std::size_t>(2 * s + 1)].data() : spare1.data();
      kt.normal_pairs(cfg_.seed, step, static_cast<std::uint32_t>(s), f, n, noise[static_cast<std::size_t>(2 * s)].data(), z1);
    }
  }

  // noise <- sqrt(2A) noise per particle, eigenvalues clamped at zero.
  void mix_noise(std::uint64_t step, std::size_t n, const std::array<std::vector<double>, kMaxDim * kMaxDim>& diff,
                 std::array<std::vector<double>, kMaxDim>& noise, std::vector<double>& mixed) const {
    const int d = plan_.d;
    mixed.resize(static_cast<std::size_t>(d));
    Eigen::MatrixXd A(d, d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    for (std::size_t p = 0; p < n; ++p) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) A(i, j) = 2.0 * diff[static_cast<std::size_t>(i * d + j)][p];
      }
      es.compute(A);
      Eigen::VectorXd ev = es.eigenvalues();
      if (ev.minCoeff() < -2e-10) fail_psd(step, 0.5 * ev.minCoeff());
      for (int i = 0; i < d; ++i) ev(i) = std::sqrt(std::max(ev(i), 0.0));
      const Eigen::MatrixXd S = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      for (int i = 0; i < d; ++i) {
        double v = 0.0;
        for (int j = 0; j < d; ++j) v += S(i, j) * noise[static_cast<std::size_t>(j)][p];
        mixed[static_cast<std::size_t>(i)] = v;
      }
      for (int i = 0; i < d; ++i) noise[static_cast<std::size_t>(i)][p] = mixed[static_cast<std::size_t>(i)];
    }
  }

  void reflect_ball(std::array<std::vector<double>, kMaxDim>& x, std::size_t n, double R) const {
    const int d = plan_.d;
    for (std::size_t p = 0; p < n; ++p) {
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) r2 += x[static_cast<std::size_t>(i)][p] * x[static_cast<std::size_t>(i)][p];
      if (r2 <= R * R) continue;
      const double r = std::sqrt(r2);
      const double f = std::max(2.0 * R - r, 0.0) / r;
      for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)][p] *= f;
    }
  }

  void check_guard(const std::array<std::vector<double>, kMaxDim>& x, std::size_t n, std::uint64_t step) const {
    const double g = cfg_.guard;
    for (int i = 0; i < plan_.d; ++i) {
      const double* v = x[static_cast<std::size_t>(i)].data();
      for (std::size_t p = 0; p < n; ++p) {
        if (!(std::abs(v[p]) <= g)) {
          throw SolverError("trajectory blow-up: |X| exceeded the guard " + time_text(g) + " at t = " +
                            time_text(static_cast<double>(step + 1) * cfg_.dt));
        }
      }
    }
  }

  const FrozenCoefficients& c_;
  const SdeConfig& cfg_;
  const Plan& plan_;
  double* out_;
};

}  // namespace

ErgodicResult solve_ergodic(const FrozenCoefficients& coeffs, const DiscreteMeasure& init, const SdeConfig& cfg) {
  cfg.validate();
  const int d = coeffs.dim();
  if (init.dim() != d) throw SolverError("initial measure has the wrong dimension");
  if (init.empty() || !(init.mass() > 0.0)) throw SolverError("initial measure is empty");
  Plan plan;
  plan.d = d;
  plan.particles = cfg.particles;
  plan.steps = static_cast<std::uint64_t>(std::llround(cfg.T / cfg.dt));
  plan.burn_steps = static_cast<std::uint64_t>(std::llround(cfg.burn_in / cfg.dt));
  const std::uint64_t sampling = plan.steps - plan.burn_steps;
  plan.stride = std::max<std::uint64_t>(1, sampling / cfg.snapshots);
  plan.snapshots = static_cast<std::size_t>(std::min<std::uint64_t>(cfg.snapshots, sampling / plan.stride));

  // Systematic resampling with offset 1/2.
  std::vector<double> start(cfg.particles * static_cast<std::size_t>(d));
  {
    const double total = init.mass();
    std::size_t k = 0;
    double cum = init.weight(0);
    for (std::size_t p = 0; p < cfg.particles; ++p) {
      const double u = (static_cast<double>(p) + 0.5) / static_cast<double>(cfg.particles) * total;
      while (cum < u && k + 1 < init.size()) cum += init.weight(++k);
      for (int i = 0; i < d; ++i) start[p * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] = init.coord(k, i);
    }
  }

  std::vector<double> coords(plan.snapshots * plan.particles * static_cast<std::size_t>(d));
  BlockRunner runner(coeffs, cfg, plan, coords.data());
  const std::size_t blocks = (cfg.particles + kBlock - 1) / kBlock;
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(blocks)));
  std::exception_ptr error;
  std::mutex error_lock;
  auto work = [&](unsigned w) {
    try {
      for (std::size_t bl = w; bl < blocks; bl += workers) {
        const std::size_t first = bl * kBlock;
        runner.run(first, std::min(kBlock, cfg.particles - first), start);
      }
    } catch (...) {
      std::lock_guard<std::mutex> g(error_lock);
      if (!error) error = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  const std::size_t atoms = plan.snapshots * plan.particles;
  std::vector<double> weights(atoms, 1.0 / static_cast<double>(atoms));
  ErgodicResult r;
  r.measure = DiscreteMeasure(d, std::move(coords), std::move(weights));
  r.particles = plan.particles;
  r.snapshots = plan.snapshots;
  return r;
}

double ergodic_std_error(const ErgodicResult& r, const std::function<double(const double*)>& f) {
  const std::size_t N = r.particles;
  std::vector<double> avg(N, 0.0);
  std::vector<double> terms(r.snapshots);
  for (std::size_t p = 0; p < N; ++p) {
    for (std::size_t s = 0; s < r.snapshots; ++s) terms[s] = f(r.measure.point(s * N + p));
    avg[p] = reduce_sum(terms) / static_cast<double>(r.snapshots);
  }
  const double m = reduce_sum(avg) / static_cast<double>(N);
  std::vector<double> dev(N);
  for (std::size_t p = 0; p < N; ++p) dev[p] = (avg[p] - m) * (avg[p] - m);
  const double var = reduce_sum(dev) / static_cast<double>(N > 1 ? N - 1 : 1);
  return std::sqrt(var / static_cast<double>(N));
}

}  // namespace kolmofix
