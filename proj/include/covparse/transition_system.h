#ifndef COVPARSE_TRANSITION_SYSTEM_H_
#define COVPARSE_TRANSITION_SYSTEM_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covparse/treebank.h"

namespace covparse {

// The order of the enumerators is also the order of the transition scores
// produced by the scorer and the tie-break order of the greedy decoder.
enum class TransitionKind : std::uint8_t { kLeftArc = 0, kRightArc = 1, kShift = 2, kNoArc = 3 };

inline constexpr std::array<TransitionKind, 4> kAllTransitionKinds = {
    TransitionKind::kLeftArc, TransitionKind::kRightArc, TransitionKind::kShift,
    TransitionKind::kNoArc};

const char* to_string(TransitionKind kind);
inline bool is_arc(TransitionKind kind) {
  return kind == TransitionKind::kLeftArc || kind == TransitionKind::kRightArc;
}

// A small set of transition kinds.
class TransitionSet {
 public:
  constexpr TransitionSet() = default;

  void insert(TransitionKind k) { bits_ |= bit(k); }
  void erase(TransitionKind k) { bits_ &= static_cast<std::uint8_t>(~bit(k)); }
  bool contains(TransitionKind k) const { return (bits_ & bit(k)) != 0; }
  bool empty() const { return bits_ == 0; }
  int size() const { return __builtin_popcount(bits_); }
  std::vector<TransitionKind> kinds() const;

  bool operator==(const TransitionSet&) const = default;

 private:
  static constexpr std::uint8_t bit(TransitionKind k) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k));
  }
  std::uint8_t bits_ = 0;
};

struct Transition {
  TransitionKind kind = TransitionKind::kShift;
  std::string label;  // only for arc transitions

  static Transition left_arc(std::string label) { return {TransitionKind::kLeftArc, std::move(label)}; }
  static Transition right_arc(std::string label) { return {TransitionKind::kRightArc, std::move(label)}; }
  static Transition shift() { return {TransitionKind::kShift, {}}; }
  static Transition no_arc() { return {TransitionKind::kNoArc, {}}; }

  bool operator==(const Transition&) const = default;
};

std::string to_string(const Transition& t);

// A Covington parser state (lambda1, lambda2, beta, A). The buffer is always
// a contiguous suffix of the sentence and is stored as its first index.
class Configuration {
 public:
  // Throws InvalidArgument for n < 1.
  static Configuration initial(int n);

  int n() const { return n_; }
  const std::vector<int>& lambda1() const { return lambda1_; }
  const std::vector<int>& lambda2() const { return lambda2_; }
  // First buffer element, or n() + 1 when the buffer is empty.
  int buffer_front() const { return buffer_front_; }
  int buffer_size() const { return n_ + 1 - buffer_front_; }
  std::vector<int> beta() const;
  bool is_final() const { return buffer_front_ > n_; }

  // Head of `node` in A, or -1.
  int head(int node) const { return heads_[node]; }
  const std::string& label(int node) const { return labels_[node]; }
  const std::vector<int>& heads() const { return heads_; }
  bool has_arc(int head, int dep) const { return heads_[dep] == head; }
  int arc_count() const;
  std::vector<Arc> arcs() const;

  // True iff A contains a (possibly empty) path from -> ... -> to.
  bool has_path(int from, int to) const;

  // Focus words; only meaningful when lambda1 is nonempty / not final.
  int focus_left() const { return lambda1_.back(); }
  int focus_right() const { return buffer_front_; }

  // "[0,1] | [] | [2,3] | {0->1:root}"
  std::string debug_string() const;

  // Checks the structural invariants; returns an empty string when they hold.
  std::string check_invariants() const;

  bool operator==(const Configuration&) const = default;

 private:
  friend Configuration apply(const Configuration& c, const Transition& t);

  int n_ = 0;
  std::vector<int> lambda1_;
  std::vector<int> lambda2_;
  int buffer_front_ = 1;
  std::vector<int> heads_;
  std::vector<std::string> labels_;
};

inline Configuration initial_config(int n) { return Configuration::initial(n); }
inline bool is_final(const Configuration& c) { return c.is_final(); }

// Returns the violated precondition of `kind` in `c`, if any.
std::optional<std::string> violated_precondition(const Configuration& c, TransitionKind kind);

// Throws InvalidArgument on a final configuration.
TransitionSet legal_transitions(const Configuration& c);

// Pure; throws InvalidArgument naming the violated precondition when `t` is
// not legal, or when an arc transition has no label.
Configuration apply(const Configuration& c, const Transition& t);

// Canonical transition sequence that builds `tree` from the initial
// configuration: an arc between the focus words when the gold tree has one,
// otherwise NO_ARC while a gold arc still links the right focus word with a
// word further left in lambda1, otherwise SHIFT.
std::vector<Transition> static_oracle(const GoldTree& tree);

// Upper bound on the length of any legal transition sequence for n words.
inline long max_transitions(int n) { return n + static_cast<long>(n) * (n + 1) / 2; }

}  // namespace covparse

#endif  // COVPARSE_TRANSITION_SYSTEM_H_
