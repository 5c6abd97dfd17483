#ifndef KPROC_KPROCESS_H_
#define KPROC_KPROCESS_H_

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "kproc/env.h"
#include "kproc/rng.h"
#include "kproc/state.h"
#include "kproc/trajectory.h"

namespace kproc {

// Lazily generated path of the K(gamma, c)-process over the stored prefix of
// `env`, one segment at a time.
//
// The per-state rate-1 Poisson clocks are realized by superposition: internal
// event times form a rate-n stream (n = prefix size) and each event carries a
// uniform label in {1, ..., n}. An event labeled x contributes a holding
// segment of length gamma(x) * Exp(1). The internal gap s before each event
// contributes c * s at infinity and tail_mass * s in TAIL, in that order.
// A finite start y begins with a holding segment gamma(y) * T0; starting at
// infinity there is no initial segment.
class KProcessStream {
 public:
  // Throws ParameterError for an empty prefix or a finite start outside it.
  KProcessStream(const WeightEnv& env, State start, Rng& rng);

  // Next segment; starts at the previous segment's end.
  Segment next();

  double elapsed() const { return clock_.value(); }
  double tail_time() const { return tail_time_; }
  double internal_time() const { return internal_time_; }

 private:
  void refill();

  const WeightEnv* env_;
  Rng* rng_;
  CompensatedSum clock_;
  double tail_time_ = 0.0;
  double internal_time_ = 0.0;
  std::array<std::pair<State, double>, 3> pending_{};
  std::size_t pending_begin_ = 0;
  std::size_t pending_end_ = 0;
};

// Trajectory of the K-process on [0, T]. Throws BudgetError when the time
// assigned to TAIL exceeds tail_budget.
Trajectory simulate_trajectory(const WeightEnv& env, State start, double horizon,
                               double tail_budget, Rng& rng);

// Gamma^(x)_c(s): the real time accumulated over internal time s by every
// stored state other than `excluded`, plus (c + tail_mass) * s. Each state's
// compound sum gamma(y) * (sum of Poisson(s) unit exponentials) is drawn as
// gamma(y) * Gamma(Poisson(s)).
double sample_excluded_clock(const WeightEnv& env, std::optional<std::uint32_t> excluded,
                             double internal_time, Rng& rng);

// Hitting time of {x} from infinity: Gamma^(x)_c evaluated at an independent
// Exp(1) internal time.
double sample_hitting_time(const WeightEnv& env, std::uint32_t x, Rng& rng);

struct Entrance {
  std::uint32_t state;
  double time;
};

// First state of A reached from infinity and the real time at which it is
// entered. A must be non-empty and inside the prefix.
Entrance sample_entrance(const WeightEnv& env, std::span<const std::uint32_t> set, Rng& rng);

}  // namespace kproc

#endif  // KPROC_KPROCESS_H_
