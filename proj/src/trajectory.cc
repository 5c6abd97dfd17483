#include "kproc/trajectory.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "kproc/error.h"

namespace kproc {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

Trajectory::Trajectory(double horizon, State start_state, std::vector<Segment> segments)
    : horizon_(horizon), start_state_(start_state), segments_(std::move(segments)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw ParameterError("trajectory horizon must be positive and finite");
  }
  if (segments_.empty() || segments_.front().start != 0.0 || segments_.back().end != horizon_) {
    throw ParameterError("segments must cover [0, horizon]");
  }
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    if (!(s.start < s.end)) throw ParameterError("segment with start >= end");
    if (i > 0 && s.start != segments_[i - 1].end) {
      throw ParameterError("segments must be contiguous");
    }
  }
}

std::size_t Trajectory::segment_index_at(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw DomainError(fmt::format("time {} outside [0, {}]", t, horizon_));
  }
  // First segment whose end is > t; at t == horizon that is past the end.
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.end; });
  if (it == segments_.end()) return segments_.size() - 1;
  return static_cast<std::size_t>(it - segments_.begin());
}

double Trajectory::occupation(State state) const {
  CompensatedSum total;
  for (const auto& s : segments_) {
    if (s.state == state) total.add(s.length());
  }
  return total.value();
}

void Trajectory::write_csv(std::ostream& out) const {
  out << "state,start,end\n";
  for (const auto& s : segments_) {
    out << fmt::format("{},{:.17g},{:.17g}\n", s.state.to_string(), s.start, s.end);
  }
}

Trajectory Trajectory::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "state,start,end") {
    throw ParameterError("trajectory CSV must start with header 'state,start,end'");
  }
  std::vector<Segment> segments;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string state, start, end;
    if (!std::getline(row, state, ',') || !std::getline(row, start, ',') ||
        !std::getline(row, end)) {
      throw ParameterError(fmt::format("malformed trajectory row '{}'", line));
    }
    try {
      segments.push_back({State::parse(state), std::stod(start), std::stod(end)});
    } catch (const std::logic_error&) {
      throw ParameterError(fmt::format("malformed trajectory row '{}'", line));
    }
  }
  if (segments.empty()) throw ParameterError("trajectory CSV has no segments");
  const State first = segments.front().state;
  const double horizon = segments.back().end;
  return Trajectory(horizon, first, std::move(segments));
}

State state_at(const Trajectory& traj, double t) {
  return traj.segments()[traj.segment_index_at(t)].state;
}

int no_jump_indicator(const Trajectory& traj, double s, double t) {
  if (!(s >= 0.0 && t >= 0.0 && s + t <= traj.horizon())) {
    throw DomainError(fmt::format("window [{}, {}] outside [0, {}]", s, s + t, traj.horizon()));
  }
  if (t == 0.0) return 1;
  const Segment& seg = traj.segments()[traj.segment_index_at(s)];
  if (!seg.state.is_finite()) return 0;
  // A segment ending exactly at the horizon has no observed jump there.
  return (seg.end > s + t || seg.end == traj.horizon()) ? 1 : 0;
}

}  // namespace kproc
