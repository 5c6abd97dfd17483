#include "kproc/env.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include <fmt/format.h>
#include "json.hpp"

#include "kproc/error.h"

namespace kproc {

BudgetError::BudgetError(double realized_tail_time, double budget)
    : Error(fmt::format("tail time {:.6g} exceeds budget {:.6g}; use a finer environment",
                        realized_tail_time, budget)),
      realized_tail_time_(realized_tail_time),
      budget_(budget) {}

std::string State::to_string() const {
  if (is_finite()) return std::to_string(index());
  return is_infinity() ? "inf" : "tail";
}

State State::parse(const std::string& text) {
  if (text == "inf") return infinity();
  if (text == "tail") return tail();
  std::size_t used = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(text, &used);
  } catch (const std::exception&) {
    throw ParameterError(fmt::format("invalid state '{}'", text));
  }
  if (used != text.size() || value == 0 || value > std::numeric_limits<std::uint32_t>::max()) {
    throw ParameterError(fmt::format("invalid state '{}'", text));
  }
  return finite(static_cast<std::uint32_t>(value));
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

void require_alpha(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
}

}  // namespace

WeightEnv::WeightEnv(std::vector<double> weights, double tail_mass, double c,
                     std::optional<double> alpha)
    : weights_(std::move(weights)), tail_mass_(tail_mass), c_(c), alpha_(alpha) {
  require(std::isfinite(tail_mass_) && tail_mass_ >= 0.0, "tail_mass must be finite and >= 0");
  require(std::isfinite(c_) && c_ >= 0.0, "c must be finite and >= 0");
  if (alpha_) require_alpha(*alpha_);
  prefix_sums_.resize(weights_.size() + 1);
  prefix_sums_[0] = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    require(std::isfinite(w) && w > 0.0, "weights must be positive and finite");
    require(i == 0 || w <= weights_[i - 1], "weights must be non-increasing");
    prefix_sums_[i + 1] = prefix_sums_[i] + w;
  }
  require(std::isfinite(prefix_sums_.back()), "total mass must be finite");
}

double WeightEnv::weight(State x) const {
  if (x.is_infinity()) return 0.0;
  if (!contains(x)) {
    throw ParameterError(fmt::format("state {} has no stored weight (prefix size {})",
                                     x.to_string(), size()));
  }
  return weights_[x.index() - 1];
}

std::string WeightEnv::to_json() const {
  nlohmann::json j;
  j["alpha"] = alpha_ ? nlohmann::json(*alpha_) : nlohmann::json(nullptr);
  j["c"] = c_;
  j["tail_mass"] = tail_mass_;
  j["weights"] = weights_;
  return j.dump();
}

WeightEnv WeightEnv::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    std::optional<double> alpha;
    if (j.contains("alpha") && !j.at("alpha").is_null()) alpha = j.at("alpha").get<double>();
    return WeightEnv(j.at("weights").get<std::vector<double>>(), j.at("tail_mass").get<double>(),
                     j.at("c").get<double>(), alpha);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(fmt::format("malformed environment JSON: {}", e.what()));
  }
}

WeightEnv make_geometric_env(double ratio, std::size_t prefix_len, double c) {
  require(ratio > 0.0 && ratio < 1.0, "geometric ratio must lie in (0, 1)");
  require(prefix_len >= 1, "prefix_len must be >= 1");
  std::vector<double> weights(prefix_len);
  double w = 1.0;
  for (auto& x : weights) {
    w *= ratio;
    x = w;
  }
  // sum_{x > n} r^x = r^(n+1) / (1 - r)
  const double tail = std::pow(ratio, static_cast<double>(prefix_len) + 1.0) / (1.0 - ratio);
  return WeightEnv(std::move(weights), tail, c);
}

WeightEnv sample_subordinator_env(double alpha, double epsilon, double c, Rng& rng) {
  require_alpha(alpha);
  require(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be positive");
  // Intensity alpha w^(-1-alpha) dw has mass epsilon^-alpha on (epsilon, inf).
  const std::uint64_t count = poisson(rng, std::pow(epsilon, -alpha));
  std::vector<double> weights(count);
  for (auto& w : weights) w = pareto(rng, alpha, epsilon);
  std::sort(weights.begin(), weights.end(), std::greater<>());
  // int_0^epsilon w alpha w^(-1-alpha) dw
  const double tail = alpha * std::pow(epsilon, 1.0 - alpha) / (1.0 - alpha);
  return WeightEnv(std::move(weights), tail, c, alpha);
}

double scaling_constant(std::uint64_t n, double alpha) {
  require(n >= 1, "n must be >= 1");
  require_alpha(alpha);
  return std::pow(static_cast<double>(n), -1.0 / alpha);
}

TrapDisorder sample_trap_disorder(std::uint32_t n, double alpha, Rng& rng) {
  require(n >= 1, "n must be >= 1");
  require_alpha(alpha);
  TrapDisorder d{n, std::vector<double>(n), alpha, scaling_constant(n, alpha)};
  for (auto& tau : d.tau) tau = pareto(rng, alpha, 1.0);
  std::sort(d.tau.begin(), d.tau.end(), std::greater<>());
  return d;
}

WeightEnv truncate_env(const WeightEnv& env, std::size_t n) {
  if (n > env.size()) {
    throw ParameterError(
        fmt::format("cannot truncate to {} weights; prefix has {}", n, env.size()));
  }
  const double dropped = env.prefix_mass() - env.prefix_mass(n);
  std::vector<double> kept(env.weights().begin(), env.weights().begin() + static_cast<long>(n));
  return WeightEnv(std::move(kept), env.tail_mass() + dropped, env.c(), env.alpha());
}

WeightEnv rescaled_trap_env(const TrapDisorder& disorder) {
  std::vector<double> weights(disorder.tau.size());
  std::transform(disorder.tau.begin(), disorder.tau.end(), weights.begin(),
                 [&](double tau) { return disorder.c_n * tau; });
  return WeightEnv(std::move(weights), 0.0, 0.0, disorder.alpha);
}

}  // namespace kproc
