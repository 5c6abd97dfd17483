#ifndef KPROC_CHAINS_H_
#define KPROC_CHAINS_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kproc/env.h"
#include "kproc/rng.h"
#include "kproc/state.h"
#include "kproc/trajectory.h"

namespace kproc {

// The finite approximating chain on {1, ..., n} (c = 0) or {1, ..., n, inf}
// (c > 0), built from the first n weights of `env`.
struct FiniteChainSpec {
  std::uint32_t n;
  const WeightEnv* env;
  double c;
};

void validate(const FiniteChainSpec& spec);

// Jump-chain simulation. c = 0: hold Exp(mean gamma(x)) at x, then jump
// uniformly over {1, ..., n} (self-jumps included); start inf means a uniform
// initial state. c > 0: from x jump to inf; at inf hold Exp(mean c/n), then
// jump uniformly. Never emits TAIL.
class FiniteChainStream {
 public:
  FiniteChainStream(const FiniteChainSpec& spec, State start, Rng& rng);
  Segment next();

 private:
  FiniteChainSpec spec_;
  Rng* rng_;
  State current_;
  CompensatedSum clock_;
};

Trajectory simulate_finite_chain(const FiniteChainSpec& spec, State start, double horizon,
                                 Rng& rng);

// REM-like trap model Y_n on the complete graph, returned in the macroscopic
// time scale Y~_n(t) = Y_n(t / c_n). Simulated in microscopic time (hold
// Exp(mean tau_i), jump uniformly) and rescaled afterwards.
// start = inf selects the uniform initial law.
class TrapStream {
 public:
  TrapStream(const TrapDisorder& disorder, State start, Rng& rng);
  Segment next();

 private:
  const TrapDisorder* disorder_;
  Rng* rng_;
  State current_;
  CompensatedSum micro_clock_;
  double macro_end_ = 0.0;
};

Trajectory simulate_trap_model(const TrapDisorder& disorder, State start, double macro_horizon,
                               Rng& rng);

// One realization of the clocks of the explicit construction, shared by
// chains of different sizes: T0, and a rate-N superposed event stream where
// event k has internal time time[k], a uniform label in {1, ..., N} and a
// unit-exponential mark. Restricting to labels <= n yields the clocks of
// the first n states. Events are generated on demand.
class ClockRealization {
 public:
  struct Event {
    double time;
    std::uint32_t label;
    double mark;
  };

  ClockRealization(std::uint32_t label_count, Rng rng);

  std::uint32_t label_count() const { return label_count_; }
  double initial_mark() const { return initial_mark_; }
  const Event& event(std::size_t k);

 private:
  std::uint32_t label_count_;
  Rng rng_;
  double initial_mark_;
  std::vector<Event> events_;
};

// X~_n^{c,y} on [0, T] driven by `clock` (n <= clock.label_count()).
Trajectory realize_finite_chain(const WeightEnv& env, std::uint32_t n, double c, State start,
                                double horizon, ClockRealization& clock);

// Gamma_n(s) = gamma(y) T0 + sum_{x <= n} gamma(x) (marks of x up to s) + c s.
double clock_value(const WeightEnv& env, std::uint32_t n, double c, State start,
                   double internal_time, ClockRealization& clock);

// max over the grid {0, step, 2 step, ..., T} of d(a(t), b(t)), with TAIL
// placed at infinity. A Skorohod-dominating proxy: no time warping.
double path_discrepancy(const Trajectory& a, const Trajectory& b, double horizon,
                        double grid_step);

}  // namespace kproc

#endif  // KPROC_CHAINS_H_
