#ifndef KPROC_TRAJECTORY_H_
#define KPROC_TRAJECTORY_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "kproc/state.h"

namespace kproc {

// The path sits in `state` on [start, end).
struct Segment {
  State state;
  double start;
  double end;

  double length() const { return end - start; }
};

// Neumaier-compensated running sum; keeps the real-time clock of long
// simulations accurate to a few ulps regardless of segment count.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Piecewise-constant cadlag path on [0, horizon]. Segments are contiguous
// (each start equals the previous end), have start < end, and the last one
// ends exactly at the horizon.
class Trajectory {
 public:
  Trajectory(double horizon, State start_state, std::vector<Segment> segments);

  double horizon() const { return horizon_; }
  State start_state() const { return start_state_; }
  const std::vector<Segment>& segments() const { return segments_; }

  // Index of the segment containing t; at a shared endpoint the later
  // segment wins. Throws DomainError outside [0, horizon].
  std::size_t segment_index_at(double t) const;

  // Total time spent in segments labeled `state`.
  double occupation(State state) const;

  // CSV with header `state,start,end`, 17 significant digits.
  void write_csv(std::ostream& out) const;
  static Trajectory read_csv(std::istream& in);

 private:
  double horizon_;
  State start_state_;
  std::vector<Segment> segments_;
};

// Label of the segment containing t (right-continuous).
State state_at(const Trajectory& traj, double t);

// 1 iff the finite-state segment containing s extends past s + t (always 1
// for the empty window t = 0). Segments at infinity or in TAIL never count as
// constant. Throws DomainError unless 0 <= s and s + t <= horizon.
int no_jump_indicator(const Trajectory& traj, double s, double t);

}  // namespace kproc

#endif  // KPROC_TRAJECTORY_H_
