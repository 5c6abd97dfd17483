#ifndef KPROC_STATE_H_
#define KPROC_STATE_H_

#include <cstdint>
#include <string>

namespace kproc {

// A point of the state space {1, 2, ..., inf}, plus the artifact label TAIL
// for time that a truncated simulation attributes to states beyond the stored
// prefix. TAIL is never identified with infinity.
class State {
 public:
  // Default-constructed state is infinity.
  constexpr State() = default;

  static constexpr State finite(std::uint32_t x) { return State(static_cast<std::int64_t>(x)); }
  static constexpr State infinity() { return State(kInfinity); }
  static constexpr State tail() { return State(kTail); }

  constexpr bool is_finite() const { return code_ > 0; }
  constexpr bool is_infinity() const { return code_ == kInfinity; }
  constexpr bool is_tail() const { return code_ == kTail; }

  // 1-based index of a finite state.
  constexpr std::uint32_t index() const { return static_cast<std::uint32_t>(code_); }

  // x^-1 with inf^-1 = 0; TAIL is placed at infinity for this purpose.
  constexpr double inverse() const { return is_finite() ? 1.0 / static_cast<double>(code_) : 0.0; }

  constexpr bool operator==(const State&) const = default;

  // "7", "inf" or "tail".
  std::string to_string() const;
  // Inverse of to_string; throws ParameterError on anything else.
  static State parse(const std::string& text);

 private:
  static constexpr std::int64_t kInfinity = 0;
  static constexpr std::int64_t kTail = -1;
  constexpr explicit State(std::int64_t code) : code_(code) {}
  std::int64_t code_ = kInfinity;
};

// d(x, y) = |x^-1 - y^-1|, the metric compactifying N* at infinity.
constexpr double state_distance(State a, State b) {
  const double d = a.inverse() - b.inverse();
  return d < 0 ? -d : d;
}

}  // namespace kproc

#endif  // KPROC_STATE_H_
