#pragma once

#include <functional>
#include <span>

#include "parrep/pdmp/geometry.hpp"
#include "parrep/pdmp/lifted_pdmp.hpp"

namespace parrep::pdmp {

/// rate(x, i, j) is lambda_i(x, j).
using RateMatrix = std::function<double(Vec2, int, int)>;

/// sum_{j != i} (lambda_j(x, i) - lambda_i(x, j)) + d_i . grad_v, where
/// grad_v is the gradient of the potential in the invariant density
/// exp(-V) at x. Zero exactly when the rates balance at (x, i).
double rate_balance_residual(const RateMatrix& rate, std::span<const Vec2> directions,
                             Vec2 grad_v, Vec2 x, int i);

/// beta d_k . grad V(x) + max_l F_{k+1,l}(x) - max_l F_{k,l}(x).
double lifted_rate_identity_residual(const LiftedMetropolisPdmp& model, Vec2 x, int k);

/// pi(x + d_k dt) - [pi(x) A_k(x) + pi(x + d_k dt) (1 - A_{k+1}(x + d_k dt))]
/// with pi = exp(-beta V) unnormalized.
double discrete_invariance_residual(const DiscretizedChain& chain, Vec2 x, int k);

}  // namespace parrep::pdmp
