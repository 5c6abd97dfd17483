#include "kproc/analytics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "kproc/error.h"
#include "kproc/quadrature.h"
#include "kproc/trajectory.h"

namespace kproc {

namespace {

constexpr quad::Tolerance kTight{1e-15, 1e-13, 20000};

double h(double lambda, double gamma) {
  const double x = lambda * gamma;
  return x / (1.0 + x);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError(fmt::format("{} must be positive and finite", name));
  }
}

// Upper bound on the stored-prefix complement for tail weights.
double tail_weight_cap(const WeightEnv& env) {
  return env.size() > 0 ? env.weights().back() : env.tail_mass();
}

// sum over the prefix (minus `skip`, 0 for none) of h(lambda, gamma) plus the
// first-order tail term lambda * tail_mass.
double resolvent_sum(const WeightEnv& env, double lambda, std::uint32_t skip = 0) {
  CompensatedSum sum;
  const auto w = env.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i + 1 == skip) continue;
    sum.add(h(lambda, w[i]));
  }
  sum.add(lambda * env.tail_mass());
  return sum.value();
}

void require_in_prefix(const WeightEnv& env, std::uint32_t x) {
  if (x == 0 || x > env.size()) {
    throw ParameterError(fmt::format("state {} outside the prefix of size {}", x, env.size()));
  }
}

double sin_pi_alpha_over_pi(double alpha) { return std::sin(std::numbers::pi * alpha) / std::numbers::pi; }

// int_0^inf w^-alpha / (1 + w) dw, split at 1; both halves mapped to smooth
// integrands on [0, 1].
double beta_denominator(double alpha) {
  const double p = 1.0 / (1.0 - alpha);
  const double q = 1.0 / alpha;
  const auto lower = quad::integrate([&](double v) { return p / (1.0 + std::pow(v, p)); }, 0.0, 1.0, kTight);
  const auto upper = quad::integrate([&](double v) { return q / (1.0 + std::pow(v, q)); }, 0.0, 1.0, kTight);
  return lower.value + upper.value;
}

double calligraphic_g(double alpha) { return std::tgamma(alpha + 1.0); }

}  // namespace

void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
}

double holding_laplace(double lambda, double gamma_x) {
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be >= 0");
  require_positive(gamma_x, "gamma_x");
  return 1.0 / (1.0 + lambda * gamma_x);
}

TailBounded entrance_laplace(const WeightEnv& env, std::span<const std::uint32_t> set,
                             double lambda, State from) {
  require_positive(lambda, "lambda");
  if (set.empty()) throw ParameterError("entrance set must be non-empty");
  std::set<std::uint32_t> members;
  for (auto x : set) {
    require_in_prefix(env, x);
    if (!members.insert(x).second) throw ParameterError("entrance set has duplicates");
  }
  if (from.is_tail()) throw ParameterError("cannot start in TAIL");
  if (from.is_finite()) {
    require_in_prefix(env, from.index());
    if (members.contains(from.index())) {
      throw ParameterError("starting state must lie outside the entrance set");
    }
  }
  CompensatedSum complement;
  const auto w = env.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!members.contains(static_cast<std::uint32_t>(i + 1))) complement.add(h(lambda, w[i]));
  }
  complement.add(lambda * env.tail_mass());
  const double denom = static_cast<double>(set.size()) + env.c() * lambda + complement.value();
  const double leave_start = 1.0 / (1.0 + lambda * env.weight(from));
  const double value = leave_start / denom;
  const double slack = lambda * lambda * tail_weight_cap(env) * env.tail_mass();
  const double bound = slack < denom ? value * slack / (denom - slack) : value;
  return {value, bound};
}

double hitting_laplace(const WeightEnv& env, std::uint32_t x, double lambda) {
  require_positive(lambda, "lambda");
  require_in_prefix(env, x);
  return 1.0 / (1.0 + env.c() * lambda + resolvent_sum(env, lambda, x));
}

double green(const WeightEnv& env, double lambda, State x) {
  require_positive(lambda, "lambda");
  const double denom = env.c() * lambda + resolvent_sum(env, lambda);
  if (!(denom > 0.0)) throw ParameterError("environment carries no mass");
  if (x.is_infinity()) return env.c() * lambda / denom;
  if (x.is_tail()) return lambda * env.tail_mass() / denom;
  require_in_prefix(env, x.index());
  return h(lambda, env.weight(x.index())) / denom;
}

double green_pair(const WeightEnv& env, double lambda, State x, State y) {
  if (y.is_tail()) throw ParameterError("cannot start in TAIL");
  if (y.is_finite()) require_in_prefix(env, y.index());
  return green(env, lambda, x) / (1.0 + lambda * env.weight(y));
}

TailBounded correlation_laplace(const WeightEnv& env, double lambda, double mu) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  CompensatedSum numer;
  for (double w : env.weights()) numer.add(h(lambda, w) * h(mu, w));
  const double denom = env.c() * lambda + resolvent_sum(env, lambda);
  if (!(denom > 0.0)) throw ParameterError("environment carries no mass");
  const double value = numer.value() / denom;
  const double cap = tail_weight_cap(env) * env.tail_mass();
  const double numer_slack = lambda * mu * cap;
  const double denom_slack = lambda * lambda * cap;
  const double bound = denom_slack < denom
                           ? (numer.value() + numer_slack) / (denom - denom_slack) - value
                           : 1.0;
  return {value, std::min(bound, 1.0)};
}

double omega_laplace(const WeightEnv& env, int i, int j, double r) {
  if (i != 0 && i != 1) throw ParameterError("omega index i must be 0 or 1");
  if (j != 1 && j != 2) throw ParameterError("omega index j must be 1 or 2");
  if (!(r >= 0.0) || !std::isfinite(r)) throw ParameterError("r must be >= 0");
  if (i == 1) require_in_prefix(env, 1);
  const double base =
      1.0 / (1.0 + env.c() * r + resolvent_sum(env, r, static_cast<std::uint32_t>(i)));
  return j == 1 ? base : base * base;
}

double aging_limit(double alpha, double theta) {
  validate_alpha(alpha);
  if (!(theta >= 0.0)) throw ParameterError("theta must be >= 0");
  if (std::isinf(theta)) return 0.0;
  // int_L^1 s^-alpha (1-s)^(alpha-1) ds with L = theta / (1 + theta).
  const double lower = theta / (1.0 + theta);
  const double one_minus_lower = 1.0 / (1.0 + theta);
  const double one_minus_split = lower >= 0.5 ? one_minus_lower : 0.5;
  // Near s = 1: s = 1 - u^(1/alpha) turns (1-s)^(alpha-1) ds into du / alpha.
  const double q = 1.0 / alpha;
  const auto near_one = quad::integrate(
      [&](double u) {
        const double one_minus_s = std::pow(u, q);
        return q * std::pow(1.0 - one_minus_s, -alpha);
      },
      0.0, std::pow(one_minus_split, alpha), kTight);
  double integral = near_one.value;
  if (lower < 0.5) {
    // Near s = 0: s = v^(1/(1-alpha)) turns s^-alpha ds into dv / (1 - alpha).
    const double p = 1.0 / (1.0 - alpha);
    const auto near_zero = quad::integrate(
        [&](double v) { return p * std::pow(1.0 - std::pow(v, p), alpha - 1.0); },
        std::pow(lower, 1.0 - alpha), std::pow(0.5, 1.0 - alpha), kTight);
    integral += near_zero.value;
  }
  return sin_pi_alpha_over_pi(alpha) * integral;
}

double aging_hat(double alpha, double theta) {
  validate_alpha(alpha);
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("Lambda-hat is defined for 0 < theta < inf only");
  }
  // int_0^inf e^{-theta/w} w^(-1-alpha) dw; w = theta / u, then u = v^(1/alpha).
  const double q = 1.0 / alpha;
  const auto tail = quad::integrate_to_infinity(
      [&](double v) { return q * std::exp(-std::pow(v, q)); }, 0.0, kTight);
  const double numerator = std::pow(theta, -alpha) * tail.value;
  return numerator / (calligraphic_g(alpha) * beta_denominator(alpha));
}

double aging_tilde(double alpha, double theta) {
  validate_alpha(alpha);
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("Lambda-tilde is defined for 0 < theta < inf only");
  }
  // Inner integral int_0^inf e^{-a/w} w^(-2-alpha) dw = a^(-1-alpha) J with
  // J = int_0^inf e^{-u} u^alpha du (w = a / u), then u = v^(1/alpha).
  const double q = 1.0 / alpha;
  const double inner_scale =
      quad::integrate_to_infinity(
          [&](double v) {
            const double u = std::pow(v, q);
            return q * u * std::exp(-u);
          },
          0.0, kTight)
          .value;
  const auto outer = quad::integrate(
      [&](double s) { return std::pow(s, alpha) * std::pow(1.0 + theta - s, -1.0 - alpha); },
      0.0, 1.0, kTight);
  return inner_scale * outer.value / (calligraphic_g(alpha) * beta_denominator(alpha));
}

double aging_limit_derivative(double alpha, double theta) {
  validate_alpha(alpha);
  if (!(theta > 0.0)) throw DomainError("Lambda' diverges at theta = 0");
  return -sin_pi_alpha_over_pi(alpha) * std::pow(theta, -alpha) / (1.0 + theta);
}

double general_aging_limit(double alpha, double theta, const std::function<double(double)>& psi1,
                           const std::function<double(double, double)>& psi2) {
  validate_alpha(alpha);
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw ParameterError("theta must be >= 0");
  const double head = psi1(theta) * aging_limit(alpha, theta);
  if (theta == 0.0) return head;
  // -int_0^theta psi2(s) Lambda'(s) ds with s = u^(1/(1-alpha)).
  const double p = 1.0 / (1.0 - alpha);
  const auto body = quad::integrate(
      [&](double u) {
        const double s = std::pow(u, p);
        return psi2(s, theta) / (1.0 + s);
      },
      0.0, std::pow(theta, 1.0 - alpha), kTight);
  return head + sin_pi_alpha_over_pi(alpha) * p * body.value;
}

double z_density(double alpha, double z) {
  validate_alpha(alpha);
  if (!(z > 0.0)) throw DomainError("Z has a density on z > 0 only");
  if (std::isinf(z)) return 0.0;
  // int_0^1 alpha s^(alpha-1) e^{-(1-s) z} ds, split at s = 1/2. Near s = 1
  // the mass sits at 1 - s ~ 1/z, so use t = (1 - s) z there; near s = 0 use
  // s = v^(1/alpha).
  const double q = 1.0 / alpha;
  const double t_max = std::min(0.5 * z, 800.0);
  const auto upper = quad::integrate(
      [&](double t) { return alpha * std::pow(1.0 - t / z, alpha - 1.0) * std::exp(-t); }, 0.0,
      t_max, kTight);
  const auto lower = quad::integrate(
      [&](double v) { return std::exp(std::expm1(q * std::log(v)) * z); }, 0.0,
      std::pow(0.5, alpha), kTight);
  const double inner = upper.value / z + lower.value;
  const double normalizer = calligraphic_g(alpha) * std::numbers::pi /
                            std::sin(std::numbers::pi * alpha);
  return std::pow(z, alpha - 1.0) * inner / normalizer;
}

}  // namespace kproc
