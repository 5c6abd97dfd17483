#ifndef KPROC_ENV_H_
#define KPROC_ENV_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kproc/rng.h"
#include "kproc/state.h"

namespace kproc {

// A summable weight sequence gamma(1) >= gamma(2) >= ... > 0, stored as a
// finite prefix plus the (exact or expected) mass of everything beyond it,
// together with the rate c >= 0 of time spent at infinity.
//
// Immutable after construction; safe to share across threads.
class WeightEnv {
 public:
  // Validates: weights positive and non-increasing, tail_mass >= 0 and finite,
  // c >= 0, alpha (when present) in (0, 1). Throws ParameterError otherwise.
  WeightEnv(std::vector<double> weights, double tail_mass, double c,
            std::optional<double> alpha = std::nullopt);

  std::size_t size() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }
  // gamma(x) for 1 <= x <= size(); gamma(inf) = 0. Throws ParameterError for
  // finite states beyond the prefix and for TAIL.
  double weight(State x) const;
  double weight(std::uint32_t x) const { return weights_[x - 1]; }
  bool contains(State x) const { return x.is_finite() && x.index() <= size(); }

  double tail_mass() const { return tail_mass_; }
  double c() const { return c_; }
  const std::optional<double>& alpha() const { return alpha_; }

  // Sum of the first k stored weights (k <= size()).
  double prefix_mass(std::size_t k) const { return prefix_sums_[k]; }
  double prefix_mass() const { return prefix_sums_.back(); }
  double total_mass() const { return prefix_mass() + tail_mass_; }

  WeightEnv with_c(double c) const { return WeightEnv(weights_, tail_mass_, c, alpha_); }

  // {"alpha": float|null, "c": float, "tail_mass": float, "weights": [...]}.
  // Doubles are written in shortest round-trip form, so parsing the output
  // reproduces the environment bit for bit.
  std::string to_json() const;
  static WeightEnv from_json(const std::string& text);

  bool operator==(const WeightEnv&) const = default;

 private:
  std::vector<double> weights_;
  std::vector<double> prefix_sums_;  // prefix_sums_[k] = gamma(1) + ... + gamma(k)
  double tail_mass_;
  double c_;
  std::optional<double> alpha_;
};

// The i.i.d. heavy-tailed mean holding times of the trap model on the
// complete graph with n vertices, in decreasing order, with the time-scaling
// constant c_n that makes the deepest traps of order one.
struct TrapDisorder {
  std::uint32_t n;
  std::vector<double> tau;  // non-increasing, length n
  double alpha;
  double c_n;
};

// gamma(x) = ratio^x for x <= prefix_len; the tail is the exact geometric sum.
WeightEnv make_geometric_env(double ratio, std::size_t prefix_len, double c);

// Jumps above epsilon of an alpha-stable subordinator on [0, 1] (Poisson
// point process with intensity alpha w^(-1-alpha) dw), sorted decreasingly.
// The mean mass of the unsampled jumps below epsilon becomes tail_mass.
WeightEnv sample_subordinator_env(double alpha, double epsilon, double c, Rng& rng);

// n i.i.d. draws with P(tau > t) = t^-alpha on t >= 1, sorted decreasingly.
TrapDisorder sample_trap_disorder(std::uint32_t n, double alpha, Rng& rng);

// (inf{t >= 0 : P(tau > t) <= 1/n})^-1, which is n^(-1/alpha) for the
// Pareto tail used here.
double scaling_constant(std::uint64_t n, double alpha);

// Keeps the first n weights; the dropped mass moves into tail_mass.
WeightEnv truncate_env(const WeightEnv& env, std::size_t n);

// Environment with weights c_n * tau and c = 0: the trap model in the
// macroscopic time scale, as a K-process environment.
WeightEnv rescaled_trap_env(const TrapDisorder& disorder);

}  // namespace kproc

#endif  // KPROC_ENV_H_
