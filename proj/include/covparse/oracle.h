#ifndef COVPARSE_ORACLE_H_
#define COVPARSE_ORACLE_H_

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "covparse/transition_system.h"
#include "covparse/treebank.h"

namespace covparse {

// Decomposition of the dynamic-oracle loss of a configuration: the gold
// arcs that can no longer be built, plus one extra missed arc per cycle in
// the graph formed by A and the gold arcs that are still individually
// buildable.
struct LossReport {
  int loss = 0;
  std::vector<Arc> unreachable;
  int cycles = 0;

  std::string debug_string() const;
};

// True iff the gold arc is in A or can still be added by some continuation.
bool arc_reachable(const Configuration& c, const Arc& arc);

// Minimum number of gold arcs missed over every final configuration
// reachable from `c` (labels ignored). O(n^2).
LossReport loss(const Configuration& c, const GoldTree& gold);

// Legal transitions that do not increase the loss. Throws on final
// configurations.
TransitionSet zero_cost_transitions(const Configuration& c, const GoldTree& gold);

// Label for an arc transition: the gold label when the arc is a gold arc,
// else the gold label of the would-be dependent, else `fallback`.
std::string oracle_label(const Configuration& c, const GoldTree& gold, TransitionKind kind,
                         const std::string& fallback = "dep");

// Exhaustive reference for the loss: depth-first search over all legal
// continuations with a memo shared across queries against the same tree.
class BruteForceOracle {
 public:
  static constexpr int kMaxWords = 7;

  // Throws InvalidArgument when the tree has more than kMaxWords words.
  explicit BruteForceOracle(const GoldTree& gold);

  int loss(const Configuration& c);
  std::size_t memo_size() const { return memo_.size(); }

 private:
  std::uint64_t key(const Configuration& c) const;

  std::vector<int> gold_heads_;
  std::unordered_map<std::uint64_t, int> memo_;
};

int brute_force_loss(const Configuration& c, const GoldTree& gold);

struct ExplorationPolicy {
  // Probability of following a loss-increasing transition when it is
  // competitive (see explore_next).
  double p_explore = 0.9;
  double margin = 1.0;
};

using TransitionScores = std::array<double, 4>;  // indexed by TransitionKind

// Highest-scoring kind in `candidates`; ties go to the earliest kind in
// enum order. `candidates` must not be empty.
TransitionKind best_scoring(const TransitionScores& scores, TransitionSet candidates);

// Training-time transition choice. Returns the best zero-cost transition
// unless some loss-increasing legal transition scores above the best
// zero-cost score minus the margin, in which case the best loss-increasing
// transition is taken with probability p_explore.
TransitionKind explore_next(const TransitionScores& scores, TransitionSet legal,
                            TransitionSet zero_cost, const ExplorationPolicy& policy,
                            std::mt19937_64& rng);

}  // namespace covparse

#endif  // COVPARSE_ORACLE_H_
