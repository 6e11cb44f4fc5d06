#include "covparse/transition_system.h"

#include <sstream>

#include "covparse/error.h"

namespace covparse {

const char* to_string(TransitionKind kind) {
  switch (kind) {
    case TransitionKind::kLeftArc:
      return "LEFT_ARC";
    case TransitionKind::kRightArc:
      return "RIGHT_ARC";
    case TransitionKind::kShift:
      return "SHIFT";
    case TransitionKind::kNoArc:
      return "NO_ARC";
  }
  return "?";
}

std::string to_string(const Transition& t) {
  std::string s = to_string(t.kind);
  if (is_arc(t.kind)) s += ":" + t.label;
  return s;
}

std::vector<TransitionKind> TransitionSet::kinds() const {
  std::vector<TransitionKind> out;
  for (TransitionKind k : kAllTransitionKinds) {
    if (contains(k)) out.push_back(k);
  }
  return out;
}

Configuration Configuration::initial(int n) {
  if (n < 1) throw InvalidArgument("initial configuration needs at least one word");
  Configuration c;
  c.n_ = n;
  c.lambda1_ = {0};
  c.buffer_front_ = 1;
  c.heads_.assign(n + 1, -1);
  c.labels_.assign(n + 1, {});
  return c;
}

std::vector<int> Configuration::beta() const {
  std::vector<int> out;
  for (int k = buffer_front_; k <= n_; ++k) out.push_back(k);
  return out;
}

int Configuration::arc_count() const {
  int count = 0;
  for (int h : heads_) count += h >= 0;
  return count;
}

std::vector<Arc> Configuration::arcs() const {
  std::vector<Arc> out;
  for (int d = 1; d <= n_; ++d) {
    if (heads_[d] >= 0) out.push_back(Arc{heads_[d], labels_[d], d});
  }
  return out;
}

bool Configuration::has_path(int from, int to) const {
  // A has at most one head per node and no cycles, so walking up from `to`
  // visits each ancestor once.
  for (int v = to; v >= 0; v = heads_[v]) {
    if (v == from) return true;
  }
  return false;
}

std::string Configuration::debug_string() const {
  std::ostringstream out;
  auto list = [&out](const std::vector<int>& xs) {
    out << '[';
    for (std::size_t k = 0; k < xs.size(); ++k) out << (k ? "," : "") << xs[k];
    out << ']';
  };
  list(lambda1_);
  out << " | ";
  list(lambda2_);
  out << " | ";
  list(beta());
  out << " | {";
  bool first = true;
  for (int d = 1; d <= n_; ++d) {
    if (heads_[d] < 0) continue;
    out << (first ? "" : ", ") << heads_[d] << "->" << d << ':' << labels_[d];
    first = false;
  }
  out << '}';
  return out.str();
}

std::string Configuration::check_invariants() const {
  std::vector<int> seen(n_ + 1, 0);
  auto check_list = [&](const std::vector<int>& xs, const char* name) -> std::string {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (xs[k] < 0 || xs[k] >= buffer_front_) {
        return std::string(name) + " holds a node not left of the buffer";
      }
      if (k > 0 && xs[k - 1] >= xs[k]) return std::string(name) + " is not increasing";
      ++seen[xs[k]];
    }
    return {};
  };
  if (auto e = check_list(lambda1_, "lambda1"); !e.empty()) return e;
  if (auto e = check_list(lambda2_, "lambda2"); !e.empty()) return e;
  for (int k = 0; k < buffer_front_ && k <= n_; ++k) {
    if (seen[k] != 1) return "node " + std::to_string(k) + " is not in exactly one list";
  }
  if (heads_[0] >= 0) return "the root has a head";
  for (int d = 1; d <= n_; ++d) {
    int steps = 0;
    for (int v = heads_[d]; v >= 0; v = heads_[v]) {
      if (v == d || ++steps > n_) return "A contains a cycle";
    }
  }
  return {};
}

std::optional<std::string> violated_precondition(const Configuration& c, TransitionKind kind) {
  if (c.is_final()) return "configuration is final";
  if (kind == TransitionKind::kShift) return std::nullopt;
  if (c.lambda1().empty()) return "lambda1 is empty";
  const int i = c.focus_left();
  const int j = c.focus_right();
  switch (kind) {
    case TransitionKind::kLeftArc:
      if (i == 0) return "LEFT_ARC requires i > 0";
      if (c.head(i) >= 0) return "LEFT_ARC requires i to have no head";
      if (c.has_path(i, j)) return "LEFT_ARC requires no path i ->* j";
      return std::nullopt;
    case TransitionKind::kRightArc:
      if (c.head(j) >= 0) return "RIGHT_ARC requires j to have no head";
      if (c.has_path(j, i)) return "RIGHT_ARC requires no path j ->* i";
      return std::nullopt;
    case TransitionKind::kNoArc:
      if (i == 0) return "NO_ARC requires i > 0";
      return std::nullopt;
    case TransitionKind::kShift:
      break;
  }
  return std::nullopt;
}

TransitionSet legal_transitions(const Configuration& c) {
  if (c.is_final()) throw InvalidArgument("no transitions from a final configuration");
  TransitionSet legal;
  for (TransitionKind k : kAllTransitionKinds) {
    if (!violated_precondition(c, k)) legal.insert(k);
  }
  return legal;
}

Configuration apply(const Configuration& c, const Transition& t) {
  if (auto why = violated_precondition(c, t.kind)) {
    throw InvalidArgument(std::string(to_string(t.kind)) + " is illegal: " + *why);
  }
  if (is_arc(t.kind) && t.label.empty()) {
    throw InvalidArgument(std::string(to_string(t.kind)) + " needs a label");
  }
  Configuration next = c;
  switch (t.kind) {
    case TransitionKind::kShift:
      next.lambda1_.insert(next.lambda1_.end(), next.lambda2_.begin(), next.lambda2_.end());
      next.lambda2_.clear();
      next.lambda1_.push_back(next.buffer_front_);
      ++next.buffer_front_;
      break;
    case TransitionKind::kLeftArc:
    case TransitionKind::kRightArc:
    case TransitionKind::kNoArc: {
      const int i = next.lambda1_.back();
      const int j = next.buffer_front_;
      next.lambda1_.pop_back();
      next.lambda2_.insert(next.lambda2_.begin(), i);
      if (t.kind == TransitionKind::kLeftArc) {
        next.heads_[i] = j;
        next.labels_[i] = t.label;
      } else if (t.kind == TransitionKind::kRightArc) {
        next.heads_[j] = i;
        next.labels_[j] = t.label;
      }
      break;
    }
  }
#ifndef NDEBUG
  if (auto e = next.check_invariants(); !e.empty()) {
    throw std::logic_error("configuration invariant violated: " + e);
  }
#endif
  return next;
}

std::vector<Transition> static_oracle(const GoldTree& tree) {
  std::vector<Transition> seq;
  Configuration c = Configuration::initial(tree.n());
  auto gold_linked = [&tree](int a, int b) { return tree.head(a) == b || tree.head(b) == a; };
  while (!c.is_final()) {
    Transition t = Transition::shift();
    if (!c.lambda1().empty()) {
      const int i = c.focus_left();
      const int j = c.focus_right();
      const auto& l1 = c.lambda1();
      bool pending_left = false;
      for (std::size_t k = 0; k + 1 < l1.size(); ++k) {
        if (gold_linked(l1[k], j)) pending_left = true;
      }
      if (i > 0 && tree.head(i) == j && !violated_precondition(c, TransitionKind::kLeftArc)) {
        t = Transition::left_arc(tree.label(i));
      } else if (tree.head(j) == i && !violated_precondition(c, TransitionKind::kRightArc)) {
        t = Transition::right_arc(tree.label(j));
      } else if (pending_left) {
        t = Transition::no_arc();
      }
    }
    c = apply(c, t);
    seq.push_back(std::move(t));
  }
  return seq;
}

}  // namespace covparse
