#include "pendamp/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <stdexcept>

namespace pendamp {

namespace {

struct BudgetExhausted {};

class CountingIntegrand {
 public:
  CountingIntegrand(const Integrand& f, std::size_t budget, std::size_t& count)
      : f_(f), budget_(budget), count_(count) {}

  double operator()(double x) const {
    if (++count_ > budget_) throw BudgetExhausted{};
    return f_(x);
  }

 private:
  const Integrand& f_;
  std::size_t budget_;
  std::size_t& count_;
};

void check_interval(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("quadrature: interval ends must be finite");
  }
}

}  // namespace

QuadratureResult gauss_kronrod(const Integrand& f, double a, double b, double tol,
                               std::size_t budget) {
  check_interval(a, b);
  QuadratureResult out;
  if (a == b) return out;
  std::size_t count = 0;
  CountingIntegrand g(f, budget, count);
  try {
    double err = 0.0, l1 = 0.0;
    out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 24, tol,
                                                                               &err, &l1);
    out.error_estimate = err;
    out.converged = std::isfinite(out.value) && err <= tol * std::max(l1, 1e-300) * 1.0001;
  } catch (const BudgetExhausted&) {
    out.converged = false;
    out.error_estimate = INFINITY;
  }
  out.evaluations = count;
  return out;
}

QuadratureResult tanh_sinh(const Integrand& f, double a, double b, double tol,
                           std::size_t budget) {
  check_interval(a, b);
  QuadratureResult out;
  if (a == b) return out;
  std::size_t count = 0;
  CountingIntegrand g(f, budget, count);
  // integrate() is not const-qualified in older Boost releases.
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  try {
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    out.value = integrator.integrate(g, a, b, tol, &err, &l1, &levels);
    out.error_estimate = err;
    out.converged = std::isfinite(out.value) && err <= tol * std::max(l1, 1e-300) * 1.0001;
  } catch (const BudgetExhausted&) {
    out.converged = false;
    out.error_estimate = INFINITY;
  } catch (const boost::math::evaluation_error&) {
    out.converged = false;
    out.error_estimate = INFINITY;
  }
  out.evaluations = count;
  return out;
}

}  // namespace pendamp
