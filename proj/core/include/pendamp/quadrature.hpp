#pragma once

#include <cstddef>
#include <functional>

namespace pendamp {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

inline constexpr std::size_t kDefaultQuadratureBudget = 1'000'000;

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (G15/K31) on a finite interval. `tol` is relative to
/// the L1 norm of the integrand. Stops early and reports converged = false
/// once `budget` integrand evaluations have been spent.
QuadratureResult gauss_kronrod(const Integrand& f, double a, double b, double tol,
                               std::size_t budget = kDefaultQuadratureBudget);

/// Double-exponential (tanh-sinh) rule; tolerant of integrable endpoint
/// singularities such as log or inverse-square-root blow-up. Never evaluates
/// f exactly at a or b.
QuadratureResult tanh_sinh(const Integrand& f, double a, double b, double tol,
                           std::size_t budget = kDefaultQuadratureBudget);

}  // namespace pendamp
