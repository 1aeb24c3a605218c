#include "parrep/harness/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "parrep/errors.hpp"

namespace parrep {
namespace {

using Rule = boost::math::quadrature::gauss<double, 8>;

struct Nodes {
  std::vector<double> x, w;
};

// Nodes of the composite rule over [a, b), panels of width 1/n.
void append_nodes(Nodes& out, double a, double b, int n) {
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) * n - 1e-9)));
  const double h = (b - a) / panels;
  const auto& abs = Rule::abscissa();
  const auto& wts = Rule::weights();
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < abs.size(); ++i) {
      const double offs = 0.5 * h * abs[i];
      const double wt = 0.5 * h * wts[i];
      if (abs[i] == 0.0) {
        out.x.push_back(mid);
        out.w.push_back(wt);
      } else {
        out.x.push_back(mid - offs);
        out.w.push_back(wt);
        out.x.push_back(mid + offs);
        out.w.push_back(wt);
      }
    }
  }
}

// Axis interval [lo, lo + width) of the torus, split where it wraps.
Nodes axis_nodes(double lo, double width, int n) {
  Nodes out;
  if (width >= 1.0) {
    append_nodes(out, 0.0, 1.0, n);
  } else if (lo + width <= 1.0) {
    append_nodes(out, lo, lo + width, n);
  } else {
    append_nodes(out, lo, 1.0, n);
    append_nodes(out, 0.0, lo + width - 1.0, n);
  }
  return out;
}

double integrate(const std::function<double(pdmp::Vec2)>& V, double beta, const Nodes& xs,
                 const Nodes& ys, double shift) {
  double total = 0.0;
  for (std::size_t i = 0; i < xs.x.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < ys.x.size(); ++j) {
      row += ys.w[j] * std::exp(-beta * (V({xs.x[i], ys.x[j]}) - shift));
    }
    total += xs.w[i] * row;
  }
  return total;
}

double ratio(const std::function<double(pdmp::Vec2)>& V, double beta, const pdmp::Box& region,
             int n) {
  const Nodes all = axis_nodes(0.0, 1.0, n);
  // Shift by the value at the first node to keep exponents moderate.
  const double shift = V({all.x.front(), all.x.front()});
  const double z = integrate(V, beta, all, all, shift);
  const Nodes rx = axis_nodes(region.lower().x, region.width().x, n);
  const Nodes ry = axis_nodes(region.lower().y, region.width().y, n);
  return integrate(V, beta, rx, ry, shift) / z;
}

}  // namespace

QuadratureResult quadrature_reference(const std::function<double(pdmp::Vec2)>& V, double beta,
                                      const pdmp::Box& region, int n, double tolerance) {
  if (n < 1) throw InvalidArgument("quadrature_reference: n must be positive");
  QuadratureResult r;
  r.coarse = ratio(V, beta, region, n);
  r.value = ratio(V, beta, region, 2 * n);
  r.relative_change = std::abs(r.value - r.coarse) / std::max(std::abs(r.value), 1e-300);
  if (r.relative_change > tolerance) {
    throw QuadratureNotConverged("quadrature_reference: n=" + std::to_string(n) + " and 2n differ by " +
                                 std::to_string(r.relative_change) + " relative");
  }
  return r;
}

}  // namespace parrep
