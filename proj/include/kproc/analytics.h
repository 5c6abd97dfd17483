#ifndef KPROC_ANALYTICS_H_
#define KPROC_ANALYTICS_H_

#include <cstdint>
#include <functional>
#include <span>

#include "kproc/env.h"
#include "kproc/state.h"

namespace kproc {

// Closed forms for the K-process transforms and the aging limit.
//
// Sums over all states of N* are evaluated over the stored prefix plus the
// first-order tail term (derivative at 0) * tail_mass. Every summand here
// has the form h(gamma) with h(w) = w h'(0) + O(w^2) and tail weights are
// below gamma(n), so the residual is second order; where a function reports
// a bound it refers to that residual.

struct TailBounded {
  double value;
  double tail_bound;  // bound on |value - infinite-environment value|
};

// E_x exp(-lambda tau_x) = 1 / (1 + lambda gamma_x).
double holding_laplace(double lambda, double gamma_x);

// E_y[f(X(tau^A)) exp(-lambda tau^A)] = coefficient * sum_{x in A} f(x), with
// coefficient 1 / ((1 + lambda gamma_y) (|A| + c lambda + S)) and
// S = sum_{x not in A} lambda gamma_x / (1 + lambda gamma_x). from = inf
// drops the (1 + lambda gamma_y) factor.
TailBounded entrance_laplace(const WeightEnv& env, std::span<const std::uint32_t> set,
                             double lambda, State from);

// E_inf exp(-lambda tau^{x}) = (1 + c lambda + sum_{y != x} lambda gamma_y / (1 + lambda gamma_y))^-1.
double hitting_laplace(const WeightEnv& env, std::uint32_t x, double lambda);

// Green kernel g_lambda(x) = lambda int e^{-lambda s} P_inf(X(s) = x) ds.
// For x = inf returns c lambda / (c lambda + S); for x = TAIL the share of
// the tail term, lambda tail_mass / (c lambda + S).
double green(const WeightEnv& env, double lambda, State x);

// g_lambda(x, y) = g_lambda(x) / (1 + lambda gamma_y); gamma(inf) = 0.
double green_pair(const WeightEnv& env, double lambda, State x, State y);

// c_lambda(mu): double Laplace transform of P_inf(no jump on [s, s + t]).
// The numerator's tail contribution is taken as 0 and bounded by
// lambda mu gamma(n) tail_mass.
TailBounded correlation_laplace(const WeightEnv& env, double lambda, double mu);

// omega_ij(r) = (1 + c r + sum_{x != i} r gamma_x / (1 + r gamma_x))^-j; i = 0
// excludes nothing.
double omega_laplace(const WeightEnv& env, int i, int j, double r);

// Lambda(theta) = sin(pi alpha)/pi int_{theta/(1+theta)}^1 s^-alpha (1-s)^(alpha-1) ds,
// by adaptive quadrature after substitutions that remove both endpoint
// singularities.
double aging_limit(double alpha, double theta);

// Lambda-hat and Lambda-tilde, with Lambda = Lambda-hat - Lambda-tilde. Both
// evaluated from their defining integrals. Lambda-hat diverges at theta = 0
// (only the difference extends continuously), so theta <= 0 is a DomainError.
double aging_hat(double alpha, double theta);
double aging_tilde(double alpha, double theta);

// Lambda'(theta) = -(sin(pi alpha)/pi) theta^-alpha / (1 + theta); diverges
// at 0.
double aging_limit_derivative(double alpha, double theta);

// Psi1(theta) Lambda(theta) - int_0^theta Psi2(s, theta) Lambda'(s) ds, the
// aging limit of a general two-time observable. The s^-alpha singularity of
// Lambda' at 0 is removed by s = u^(1/(1-alpha)).
double general_aging_limit(double alpha, double theta, const std::function<double(double)>& psi1,
                           const std::function<double(double, double)>& psi2);

// Density of the limit in law of t / gamma(X_t), whose Laplace transform is
// Lambda:
// z^(alpha-1) int_0^1 alpha s^(alpha-1) e^{-(1-s) z} ds / (Gamma(alpha+1) pi / sin(pi alpha)).
double z_density(double alpha, double z);

void validate_alpha(double alpha);

}  // namespace kproc

#endif  // KPROC_ANALYTICS_H_
