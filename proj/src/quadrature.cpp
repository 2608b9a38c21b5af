#include "lgra/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace lgra {

const GaussRule& gauss_legendre_16() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, 16>;
    GaussRule r;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      r.nodes.push_back(-x[i]);
      r.weights.push_back(w[i]);
      r.nodes.push_back(x[i]);
      r.weights.push_back(w[i]);
    }
    return r;
  }();
  return rule;
}

GaussRule composite_gauss(double a, double b, int panels) {
  const GaussRule& base = gauss_legendre_16();
  GaussRule out;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      out.nodes.push_back(mid + 0.5 * h * base.nodes[i]);
      out.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return out;
}

}  // namespace lgra
