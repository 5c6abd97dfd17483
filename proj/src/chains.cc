#include "kproc/chains.h"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "kproc/error.h"

namespace kproc {

namespace {

void require_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ParameterError("horizon must be positive and finite");
  }
}

// Pulls segments from `stream` until the horizon and clips the last one.
template <class Stream>
Trajectory collect(Stream& stream, State start, double horizon) {
  std::vector<Segment> segments;
  for (;;) {
    Segment s = stream.next();
    if (s.end >= horizon) {
      s.end = horizon;
      segments.push_back(s);
      break;
    }
    segments.push_back(s);
  }
  return Trajectory(horizon, start, std::move(segments));
}

}  // namespace

void validate(const FiniteChainSpec& spec) {
  if (spec.env == nullptr) throw ParameterError("finite chain needs an environment");
  if (spec.n < 1) throw ParameterError("finite chain needs n >= 1");
  if (spec.n > spec.env->size()) {
    throw ParameterError(fmt::format("chain size {} exceeds the stored prefix {}", spec.n,
                                     spec.env->size()));
  }
  if (!(spec.c >= 0.0) || !std::isfinite(spec.c)) throw ParameterError("c must be >= 0");
}

FiniteChainStream::FiniteChainStream(const FiniteChainSpec& spec, State start, Rng& rng)
    : spec_(spec), rng_(&rng), current_(start) {
  validate(spec_);
  if (start.is_tail() || (start.is_finite() && start.index() > spec_.n)) {
    throw ParameterError(fmt::format("start {} invalid for a chain on {} states",
                                     start.to_string(), spec_.n));
  }
  if (start.is_infinity() && spec_.c == 0.0) {
    current_ = State::finite(uniform_label(rng, spec_.n));
  }
}

Segment FiniteChainStream::next() {
  for (;;) {
    const State here = current_;
    double length;
    if (here.is_finite()) {
      length = spec_.env->weight(here.index()) * exponential(*rng_);
      current_ = spec_.c > 0.0 ? State::infinity() : State::finite(uniform_label(*rng_, spec_.n));
    } else {
      length = spec_.c / static_cast<double>(spec_.n) * exponential(*rng_);
      current_ = State::finite(uniform_label(*rng_, spec_.n));
    }
    const double start = clock_.value();
    clock_.add(length);
    const double end = clock_.value();
    if (end > start) return {here, start, end};
  }
}

Trajectory simulate_finite_chain(const FiniteChainSpec& spec, State start, double horizon,
                                 Rng& rng) {
  require_horizon(horizon);
  FiniteChainStream stream(spec, start, rng);
  return collect(stream, start, horizon);
}

TrapStream::TrapStream(const TrapDisorder& disorder, State start, Rng& rng)
    : disorder_(&disorder), rng_(&rng), current_(start) {
  if (disorder.n < 1 || disorder.tau.size() != disorder.n || !(disorder.c_n > 0.0)) {
    throw ParameterError("malformed trap disorder");
  }
  if (start.is_tail() || (start.is_finite() && start.index() > disorder.n)) {
    throw ParameterError(fmt::format("start {} invalid for a trap model on {} sites",
                                     start.to_string(), disorder.n));
  }
  if (start.is_infinity()) current_ = State::finite(uniform_label(rng, disorder.n));
}

Segment TrapStream::next() {
  for (;;) {
    const State here = current_;
    micro_clock_.add(disorder_->tau[here.index() - 1] * exponential(*rng_));
    current_ = State::finite(uniform_label(*rng_, disorder_->n));
    const double start = macro_end_;
    macro_end_ = disorder_->c_n * micro_clock_.value();
    if (macro_end_ > start) return {here, start, macro_end_};
  }
}

Trajectory simulate_trap_model(const TrapDisorder& disorder, State start, double macro_horizon,
                               Rng& rng) {
  require_horizon(macro_horizon);
  TrapStream stream(disorder, start, rng);
  return collect(stream, start, macro_horizon);
}

ClockRealization::ClockRealization(std::uint32_t label_count, Rng rng)
    : label_count_(label_count), rng_(std::move(rng)) {
  if (label_count_ < 1) throw ParameterError("clock needs at least one label");
  initial_mark_ = exponential(rng_);
}

const ClockRealization::Event& ClockRealization::event(std::size_t k) {
  while (events_.size() <= k) {
    const double previous = events_.empty() ? 0.0 : events_.back().time;
    const double time = previous + exponential(rng_) / static_cast<double>(label_count_);
    const std::uint32_t label = uniform_label(rng_, label_count_);
    events_.push_back({time, label, exponential(rng_)});
  }
  return events_[k];
}

namespace {

void require_coupling(const WeightEnv& env, std::uint32_t n, double c, State start,
                      const ClockRealization& clock) {
  validate(FiniteChainSpec{n, &env, c});
  if (n > clock.label_count()) {
    throw ParameterError(
        fmt::format("chain size {} exceeds the clock's {} labels", n, clock.label_count()));
  }
  if (start.is_tail() || (start.is_finite() && start.index() > n)) {
    throw ParameterError(fmt::format("start {} invalid for a chain on {} states",
                                     start.to_string(), n));
  }
}

}  // namespace

Trajectory realize_finite_chain(const WeightEnv& env, std::uint32_t n, double c, State start,
                                double horizon, ClockRealization& clock) {
  require_horizon(horizon);
  require_coupling(env, n, c, start, clock);
  std::vector<Segment> segments;
  CompensatedSum real_time;
  // Appends a segment; returns true once the horizon is reached.
  auto push = [&](State state, double length) {
    const double begin = real_time.value();
    real_time.add(length);
    double end = real_time.value();
    if (!(end > begin)) return false;
    const bool done = end >= horizon;
    if (done) end = horizon;
    segments.push_back({state, begin, end});
    return done;
  };
  if (start.is_finite() && push(start, env.weight(start.index()) * clock.initial_mark())) {
    return Trajectory(horizon, start, std::move(segments));
  }
  double last_time = 0.0;
  for (std::size_t k = 0;; ++k) {
    const auto& e = clock.event(k);
    if (e.label > n) continue;
    if (c > 0.0 && push(State::infinity(), c * (e.time - last_time))) break;
    last_time = e.time;
    if (push(State::finite(e.label), env.weight(e.label) * e.mark)) break;
  }
  return Trajectory(horizon, start, std::move(segments));
}

double clock_value(const WeightEnv& env, std::uint32_t n, double c, State start,
                   double internal_time, ClockRealization& clock) {
  require_coupling(env, n, c, start, clock);
  CompensatedSum total;
  if (start.is_finite()) total.add(env.weight(start.index()) * clock.initial_mark());
  for (std::size_t k = 0;; ++k) {
    const auto& e = clock.event(k);
    if (e.time > internal_time) break;
    if (e.label <= n) total.add(env.weight(e.label) * e.mark);
  }
  total.add(c * internal_time);
  return total.value();
}

double path_discrepancy(const Trajectory& a, const Trajectory& b, double horizon,
                        double grid_step) {
  if (!(grid_step > 0.0)) throw ParameterError("grid_step must be positive");
  if (!(horizon > 0.0) || a.horizon() < horizon || b.horizon() < horizon) {
    throw ParameterError("both trajectories must cover the comparison horizon");
  }
  const auto& sa = a.segments();
  const auto& sb = b.segments();
  std::size_t ia = 0;
  std::size_t ib = 0;
  double worst = 0.0;
  auto visit = [&](double t) {
    while (ia + 1 < sa.size() && sa[ia].end <= t) ++ia;
    while (ib + 1 < sb.size() && sb[ib].end <= t) ++ib;
    worst = std::max(worst, state_distance(sa[ia].state, sb[ib].state));
  };
  const auto steps = static_cast<std::uint64_t>(std::floor(horizon / grid_step));
  for (std::uint64_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * grid_step;
    if (t > horizon) break;
    visit(t);
  }
  visit(horizon);
  return worst;
}

}  // namespace kproc
