#include "covparse/oracle.h"

#include <algorithm>
#include <limits>
#include <sstream>

#include "covparse/error.h"

namespace covparse {

std::string LossReport::debug_string() const {
  std::ostringstream out;
  out << "loss=" << loss << " cycles=" << cycles << " unreachable={";
  for (std::size_t k = 0; k < unreachable.size(); ++k) {
    out << (k ? ", " : "") << unreachable[k].head << "->" << unreachable[k].dep;
  }
  out << '}';
  return out.str();
}

bool arc_reachable(const Configuration& c, const Arc& arc) {
  if (c.head(arc.dep) == arc.head) return true;
  const int left = std::min(arc.head, arc.dep);
  const int right = std::max(arc.head, arc.dep);
  if (right < c.buffer_front()) return false;
  if (right == c.buffer_front() &&
      !std::binary_search(c.lambda1().begin(), c.lambda1().end(), left)) {
    return false;
  }
  if (c.head(arc.dep) >= 0) return false;
  return !c.has_path(arc.dep, arc.head);
}

LossReport loss(const Configuration& c, const GoldTree& gold) {
  if (gold.n() != c.n()) {
    throw InvalidArgument("gold tree has " + std::to_string(gold.n()) +
                          " words, configuration has " + std::to_string(c.n()));
  }
  const int n = c.n();
  LossReport report;
  // Head links of A extended with every individually buildable gold arc.
  // Buildable arcs attach headless dependents, so each node keeps at most
  // one head and the cycles of this graph are vertex-disjoint.
  std::vector<int> head(n + 1, -1);
  for (int d = 1; d <= n; ++d) {
    head[d] = c.head(d);
    Arc arc{gold.head(d), gold.label(d), d};
    if (!arc_reachable(c, arc)) {
      report.unreachable.push_back(std::move(arc));
    } else if (head[d] < 0) {
      head[d] = gold.head(d);
    }
  }
  // Colour-walk the functional graph: 0 unvisited, otherwise the id of the
  // walk that first reached the node.
  std::vector<int> walk(n + 1, 0);
  for (int start = 1; start <= n; ++start) {
    int v = start;
    while (v >= 0 && walk[v] == 0) {
      walk[v] = start;
      v = head[v];
    }
    if (v >= 0 && walk[v] == start) ++report.cycles;
  }
  report.loss = static_cast<int>(report.unreachable.size()) + report.cycles;
  return report;
}

TransitionSet zero_cost_transitions(const Configuration& c, const GoldTree& gold) {
  const TransitionSet legal = legal_transitions(c);
  const int base = loss(c, gold).loss;
  TransitionSet zero;
  for (TransitionKind k : legal.kinds()) {
    Configuration next = apply(c, Transition{k, is_arc(k) ? "_" : ""});
    if (loss(next, gold).loss == base) zero.insert(k);
  }
  return zero;
}

std::string oracle_label(const Configuration& c, const GoldTree& gold, TransitionKind kind,
                         const std::string& fallback) {
  if (!is_arc(kind) || c.is_final() || c.lambda1().empty()) return fallback;
  const int i = c.focus_left();
  const int j = c.focus_right();
  const int head = kind == TransitionKind::kLeftArc ? j : i;
  const int dep = kind == TransitionKind::kLeftArc ? i : j;
  if (dep < 1 || dep > gold.n()) return fallback;
  if (gold.head(dep) == head) return gold.label(dep);
  const std::string& label = gold.label(dep);
  return label.empty() ? fallback : label;
}

BruteForceOracle::BruteForceOracle(const GoldTree& gold) : gold_heads_(gold.heads()) {
  if (gold.n() > kMaxWords) {
    throw InvalidArgument("brute-force oracle is limited to " + std::to_string(kMaxWords) +
                          " words");
  }
}

std::uint64_t BruteForceOracle::key(const Configuration& c) const {
  // lambda1 and lambda2 partition the nodes left of the buffer, so the
  // membership mask of lambda2 plus the buffer front fixes both lists.
  std::uint64_t k = static_cast<std::uint64_t>(c.buffer_front());
  std::uint64_t mask = 0;
  for (int v : c.lambda2()) mask |= 1ull << v;
  k |= mask << 4;
  for (int d = 1; d <= c.n(); ++d) {
    std::uint64_t h = c.head(d) < 0 ? 15u : static_cast<std::uint64_t>(c.head(d));
    k |= h << (12 + 4 * (d - 1));
  }
  return k;
}

int BruteForceOracle::loss(const Configuration& c) {
  if (c.n() + 1 != static_cast<int>(gold_heads_.size())) {
    throw InvalidArgument("configuration and gold tree sizes differ");
  }
  const std::uint64_t k = key(c);
  if (auto it = memo_.find(k); it != memo_.end()) return it->second;
  int best;
  if (c.is_final()) {
    best = 0;
    for (int d = 1; d <= c.n(); ++d) best += c.head(d) != gold_heads_[d];
  } else {
    best = std::numeric_limits<int>::max();
    for (TransitionKind t : legal_transitions(c).kinds()) {
      best = std::min(best, loss(apply(c, Transition{t, is_arc(t) ? "_" : ""})));
    }
  }
  memo_.emplace(k, best);
  return best;
}

int brute_force_loss(const Configuration& c, const GoldTree& gold) {
  BruteForceOracle oracle(gold);
  return oracle.loss(c);
}

TransitionKind best_scoring(const TransitionScores& scores, TransitionSet candidates) {
  if (candidates.empty()) throw InvalidArgument("no candidate transitions");
  TransitionKind best = TransitionKind::kShift;
  double best_score = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (TransitionKind k : candidates.kinds()) {
    const double s = scores[static_cast<int>(k)];
    if (!found || s > best_score) {
      best = k;
      best_score = s;
      found = true;
    }
  }
  return best;
}

TransitionKind explore_next(const TransitionScores& scores, TransitionSet legal,
                            TransitionSet zero_cost, const ExplorationPolicy& policy,
                            std::mt19937_64& rng) {
  if (zero_cost.empty()) throw InvalidArgument("empty zero-cost transition set");
  const TransitionKind best_correct = best_scoring(scores, zero_cost);
  TransitionSet wrong = legal;
  for (TransitionKind k : zero_cost.kinds()) wrong.erase(k);
  if (wrong.empty()) return best_correct;
  const TransitionKind best_wrong = best_scoring(scores, wrong);
  const double gap = scores[static_cast<int>(best_correct)] - policy.margin;
  if (scores[static_cast<int>(best_wrong)] > gap) {
    std::bernoulli_distribution explore(std::clamp(policy.p_explore, 0.0, 1.0));
    if (explore(rng)) return best_wrong;
  }
  return best_correct;
}

}  // namespace covparse
