#include "parrep/pdmp/residuals.hpp"

#include <cmath>

namespace parrep::pdmp {

double rate_balance_residual(const RateMatrix& rate, std::span<const Vec2> directions,
                             Vec2 grad_v, Vec2 x, int i) {
  double sum = 0.0;
  const int n = static_cast<int>(directions.size());
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    sum += rate(x, j, i) - rate(x, i, j);
  }
  return sum + dot(directions[static_cast<std::size_t>(i)], grad_v);
}

double lifted_rate_identity_residual(const LiftedMetropolisPdmp& model, Vec2 x, int k) {
  const Vec2 g = model.potential().gradient(x);
  return model.beta() * dot(model.direction(k), g) + model.switching_rate(x, model.next(k)) -
         model.switching_rate(x, k);
}

double discrete_invariance_residual(const DiscretizedChain& chain, Vec2 x, int k) {
  const auto& model = chain.model();
  const auto pi = [&](Vec2 p) { return std::exp(-model.beta() * model.potential()(p)); };
  const Vec2 y = x + chain.dt() * model.direction(k);
  const double lhs = pi(y);
  const double rhs =
      pi(x) * chain.acceptance(x, k) + pi(y) * (1.0 - chain.acceptance(y, model.next(k)));
  return lhs - rhs;
}

}  // namespace parrep::pdmp
