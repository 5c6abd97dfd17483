#include "kproc/kprocess.h"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "kproc/error.h"

namespace kproc {

namespace {

void require_prefix(const WeightEnv& env) {
  if (env.size() == 0) throw ParameterError("environment has no stored weights");
  if (env.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ParameterError("environment prefix too large");
  }
}

std::uint32_t prefix_size(const WeightEnv& env) { return static_cast<std::uint32_t>(env.size()); }

}  // namespace

KProcessStream::KProcessStream(const WeightEnv& env, State start, Rng& rng)
    : env_(&env), rng_(&rng) {
  require_prefix(env);
  if (start.is_tail()) throw ParameterError("cannot start in TAIL");
  if (start.is_finite()) {
    const double gamma_y = env.weight(start);  // throws outside the prefix
    pending_[0] = {start, gamma_y * exponential(rng)};
    pending_end_ = 1;
  }
}

void KProcessStream::refill() {
  pending_begin_ = 0;
  pending_end_ = 0;
  const std::uint32_t n = prefix_size(*env_);
  const double gap = exponential(*rng_) / static_cast<double>(n);
  internal_time_ += gap;
  if (env_->c() > 0.0) pending_[pending_end_++] = {State::infinity(), env_->c() * gap};
  if (env_->tail_mass() > 0.0) {
    const double tail = env_->tail_mass() * gap;
    tail_time_ += tail;
    pending_[pending_end_++] = {State::tail(), tail};
  }
  const std::uint32_t x = uniform_label(*rng_, n);
  pending_[pending_end_++] = {State::finite(x), env_->weight(x) * exponential(*rng_)};
}

Segment KProcessStream::next() {
  for (;;) {
    if (pending_begin_ == pending_end_) refill();
    const auto [state, length] = pending_[pending_begin_++];
    const double start = clock_.value();
    clock_.add(length);
    const double end = clock_.value();
    // Lengths below the clock's resolution leave no trace on the path.
    if (end > start) return {state, start, end};
  }
}

Trajectory simulate_trajectory(const WeightEnv& env, State start, double horizon,
                               double tail_budget, Rng& rng) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ParameterError("horizon must be positive and finite");
  }
  if (!(tail_budget > 0.0)) throw ParameterError("tail_budget must be positive");
  KProcessStream stream(env, start, rng);
  std::vector<Segment> segments;
  double tail_time = 0.0;
  for (;;) {
    Segment s = stream.next();
    const bool last = s.end >= horizon;
    if (last) s.end = horizon;
    if (s.state.is_tail()) tail_time += s.length();
    segments.push_back(s);
    if (last) break;
  }
  if (tail_time > tail_budget) throw BudgetError(tail_time, tail_budget);
  return Trajectory(horizon, start, std::move(segments));
}

double sample_excluded_clock(const WeightEnv& env, std::optional<std::uint32_t> excluded,
                             double internal_time, Rng& rng) {
  if (!(internal_time >= 0.0)) throw ParameterError("internal time must be >= 0");
  CompensatedSum total;
  const std::uint32_t n = prefix_size(env);
  for (std::uint32_t y = 1; y <= n; ++y) {
    if (excluded && *excluded == y) continue;
    const std::uint64_t events = poisson(rng, internal_time);
    if (events == 0) continue;
    total.add(env.weight(y) * gamma_variate(rng, static_cast<double>(events)));
  }
  total.add((env.c() + env.tail_mass()) * internal_time);
  return total.value();
}

double sample_hitting_time(const WeightEnv& env, std::uint32_t x, Rng& rng) {
  require_prefix(env);
  if (x == 0 || x > env.size()) {
    throw ParameterError(fmt::format("target state {} outside the prefix of size {}", x, env.size()));
  }
  const double first_event = exponential(rng);
  return sample_excluded_clock(env, x, first_event, rng);
}

Entrance sample_entrance(const WeightEnv& env, std::span<const std::uint32_t> set, Rng& rng) {
  require_prefix(env);
  if (set.empty()) throw ParameterError("entrance set must be non-empty");
  const std::uint32_t n = prefix_size(env);
  std::vector<bool> member(n + 1, false);
  for (std::uint32_t x : set) {
    if (x == 0 || x > n) {
      throw ParameterError(fmt::format("entrance state {} outside the prefix of size {}", x, n));
    }
    member[x] = true;
  }
  const double drift = env.c() + env.tail_mass();
  CompensatedSum clock;
  for (;;) {
    clock.add(drift * exponential(rng) / static_cast<double>(n));
    const std::uint32_t x = uniform_label(rng, n);
    if (member[x]) return {x, clock.value()};
    clock.add(env.weight(x) * exponential(rng));
  }
}

}  // namespace kproc
