#include <cmath>

#include "kolmofix/coeff.hpp"
#include "kolmofix/error.hpp"

namespace kolmofix {

MollifierKernel::Kind parse_kernel_kind(const std::string& name) {
  if (name == "box") return MollifierKernel::Kind::box;
  if (name == "triangular") return MollifierKernel::Kind::triangular;
  if (name == "quartic") return MollifierKernel::Kind::quartic;
  throw ConfigError("unknown mollifier kernel '" + name + "' (box, triangular, quartic)");
}

double kernel_profile(MollifierKernel::Kind kind, double t) {
  const double a = std::abs(t);
  switch (kind) {
    case MollifierKernel::Kind::box: return a <= 0.5 ? 1.0 : 0.0;
    case MollifierKernel::Kind::triangular: return a < 1.0 ? 1.0 - a : 0.0;
    case MollifierKernel::Kind::quartic: return a < 1.0 ? 15.0 / 16.0 * (1.0 - t * t) * (1.0 - t * t) : 0.0;
  }
  return 0.0;
}

namespace {

struct Node1 {
  double s;
  double w;
};

std::vector<Node1> kernel_nodes(const MollifierKernel& k) {
  const double half = k.kind == MollifierKernel::Kind::box ? 0.5 : 1.0;
  const double step = 2.0 * half / k.nodes;
  std::vector<Node1> nodes;
  double total = 0.0;
  for (int j = 0; j < k.nodes; ++j) {
    const double s = -half + (j + 0.5) * step;
    const double w = kernel_profile(k.kind, s);
    if (w <= 0.0) continue;
    nodes.push_back({s, w});
    total += w;
  }
  for (Node1& n : nodes) n.w /= total;
  return nodes;
}

class FrozenMollified final : public FrozenCoefficients {
 public:
  FrozenMollified(std::shared_ptr<const FrozenCoefficients> inner, int m, double delta, std::vector<Node1> nodes)
      : FrozenCoefficients(inner->dim()), inner_(std::move(inner)), m_(m), delta_(delta), nodes_(std::move(nodes)) {}

  void at(const double* x, double* a, double* b) const override {
    const int d = dim();
    std::array<double, kMaxDim> xs{};
    std::array<double, kMaxDim * kMaxDim> ai{};
    std::array<double, kMaxDim> bi{};
    std::fill(a, a + d * d, 0.0);
    std::fill(b, b + d, 0.0);
    std::size_t tuples = 1;
    for (int i = 0; i < m_; ++i) tuples *= nodes_.size();
    for (std::size_t t = 0; t < tuples; ++t) {
      double w = 1.0;
      std::size_t rest = t;
      for (int i = 0; i < d; ++i) xs[static_cast<std::size_t>(i)] = x[i];
      for (int i = 0; i < m_; ++i) {
        const Node1& n = nodes_[rest % nodes_.size()];
        rest /= nodes_.size();
        xs[static_cast<std::size_t>(i)] = x[i] - delta_ * n.s;
        w *= n.w;
      }
      inner_->at(xs.data(), ai.data(), bi.data());
      for (int k = 0; k < d * d; ++k) a[k] += w * ai[static_cast<std::size_t>(k)];
      for (int k = 0; k < d; ++k) b[k] += w * bi[static_cast<std::size_t>(k)];
    }
  }

  bool diagonal() const override { return inner_->diagonal(); }
  double scale(const double* x) const override { return inner_->scale(x); }
  double source(const double* x) const override { return inner_->source(x); }
  double radius() const override { return inner_->radius(); }

 private:
  std::shared_ptr<const FrozenCoefficients> inner_;
  int m_;
  double delta_;
  std::vector<Node1> nodes_;
};

class MollifiedField final : public CoefficientField {
 public:
  MollifiedField(FieldPtr inner, MollifierKernel kernel) : inner_(std::move(inner)), kernel_(kernel) {
    nodes_ = kernel_nodes(kernel_);
  }
  int dim() const override { return inner_->dim(); }
  int m() const override { return inner_->m(); }
  bool measure_dependent() const override { return inner_->measure_dependent(); }
  std::shared_ptr<const FrozenCoefficients> freeze(const DiscreteMeasure& sigma) const override {
    return std::make_shared<FrozenMollified>(inner_->freeze(sigma), inner_->m(), kernel_.delta, nodes_);
  }
  std::string describe() const override {
    return "mollified(delta = " + std::to_string(kernel_.delta) + ") " + inner_->describe();
  }

 private:
  FieldPtr inner_;
  MollifierKernel kernel_;
  std::vector<Node1> nodes_;
};

}  // namespace

FieldPtr mollify(const FieldPtr& field, const MollifierKernel& kernel, std::string* warning) {
  if (!(kernel.delta > 0.0)) throw ConfigError("mollifier delta must be positive");
  if (kernel.nodes < 64) throw ConfigError("mollifier quadrature needs at least 64 nodes");
  if (field->m() == 0) {
    if (warning != nullptr) *warning = "m = 0: no non-degenerate block to convolve, field returned unchanged";
    return field;
  }
  return std::make_shared<MollifiedField>(field, kernel);
}

}  // namespace kolmofix
