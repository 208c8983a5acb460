#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "kolmofix/coeff.hpp"
#include "kolmofix/measure.hpp"

namespace kfx_test {

using namespace kolmofix;

inline std::shared_ptr<const ExprField> field1(const std::string& a, const std::string& b, int m = 1) {
  return std::make_shared<const ExprField>(1, m, std::vector<std::string>{a}, std::vector<std::string>{b});
}

inline std::shared_ptr<const ExprField> field2(const std::vector<std::string>& a, const std::vector<std::string>& b,
                                               int m) {
  return std::make_shared<const ExprField>(2, m, a, b);
}

inline DiscreteMeasure atoms1(const std::vector<double>& x, const std::vector<double>& w) {
  return DiscreteMeasure(1, x, w);
}

inline DiscreteMeasure delta(double x) { return DiscreteMeasure::dirac({x}); }

inline DiscreteMeasure two_point() { return atoms1({-1.0, 1.0}, {0.5, 0.5}); }

/// sqrt(erf(1) / (2 sqrt(pi))): L2 norm of the standard normal density on [-1, 1].
inline double normal_l2_on_unit() { return std::sqrt(std::erf(1.0) / (2.0 * std::sqrt(M_PI))); }

}  // namespace kfx_test
