#include "covparse/treebank.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>

#include "covparse/error.h"

namespace covparse {
namespace {

constexpr std::size_t kColumns = 10;

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.emplace_back(line.substr(start));
      break;
    }
    cols.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

std::string_view rstrip(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

struct PendingSentence {
  Sentence sentence;
  std::vector<std::size_t> token_lines;
  std::size_t first_line = 0;
  bool empty() const {
    return sentence.tokens.empty() && sentence.comments.empty() &&
           sentence.mwt_ranges.empty() && sentence.empty_nodes.empty();
  }
};

void finish_sentence(PendingSentence& pending, const ReadOptions& opts,
                     std::vector<Sentence>& out) {
  if (pending.empty()) return;
  Sentence& s = pending.sentence;
  if (s.tokens.empty()) {
    throw ParseError(pending.first_line, "sentence has no word lines");
  }
  const int n = s.size();
  int roots = 0;
  for (std::size_t k = 0; k < s.tokens.size(); ++k) {
    const Token& t = s.tokens[k];
    if (t.head && (*t.head < 0 || *t.head > n)) {
      throw ParseError(pending.token_lines[k],
                       "head " + std::to_string(*t.head) + " out of range 0.." +
                           std::to_string(n));
    }
    if (t.head && *t.head == t.id) {
      throw ParseError(pending.token_lines[k], "word is its own head");
    }
    if (t.head && *t.head == 0) ++roots;
  }
  if (opts.strict && roots > 1) {
    throw ParseError(pending.first_line,
                     "sentence has " + std::to_string(roots) + " root words");
  }
  for (const MultiwordToken& m : s.mwt_ranges) {
    if (m.start < 1 || m.end > n) {
      throw ParseError(pending.first_line, "multiword range " + std::to_string(m.start) +
                                               "-" + std::to_string(m.end) +
                                               " outside the sentence");
    }
  }
  out.push_back(std::move(s));
  pending = PendingSentence{};
}

void parse_word_line(std::vector<std::string>& cols, std::size_t line_no,
                     PendingSentence& pending) {
  Sentence& s = pending.sentence;
  auto id = parse_int(cols[0]);
  if (!id) throw ParseError(line_no, "invalid word id '" + cols[0] + "'");
  if (*id != s.size() + 1) {
    throw ParseError(line_no, "expected word id " + std::to_string(s.size() + 1) +
                                  ", found " + cols[0]);
  }
  Token t;
  t.id = *id;
  t.form = std::move(cols[1]);
  if (t.form.empty()) throw ParseError(line_no, "empty FORM");
  t.lemma = std::move(cols[2]);
  t.upos = std::move(cols[3]);
  t.xpos = std::move(cols[4]);
  t.feats = std::move(cols[5]);
  if (cols[6] != "_") {
    auto head = parse_int(cols[6]);
    if (!head) throw ParseError(line_no, "invalid head '" + cols[6] + "'");
    t.head = *head;
  }
  if (cols[7] != "_") t.deprel = std::move(cols[7]);
  t.deps = std::move(cols[8]);
  t.misc = std::move(cols[9]);
  if (pending.token_lines.empty() && pending.first_line == 0) pending.first_line = line_no;
  s.tokens.push_back(std::move(t));
  pending.token_lines.push_back(line_no);
}

}  // namespace

std::vector<Sentence> read_conllu(std::istream& in, const ReadOptions& opts) {
  std::vector<Sentence> out;
  PendingSentence pending;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = rstrip(raw);
    if (line.empty()) {
      finish_sentence(pending, opts, out);
      continue;
    }
    if (pending.first_line == 0) pending.first_line = line_no;
    if (line.front() == '#') {
      if (!pending.sentence.tokens.empty() || !pending.sentence.mwt_ranges.empty()) {
        throw ParseError(line_no, "comment line inside a sentence");
      }
      pending.sentence.comments.emplace_back(line);
      continue;
    }
    std::vector<std::string> cols = split_tabs(line);
    if (cols.size() != kColumns) {
      throw ParseError(line_no, "expected 10 tab-separated columns, found " +
                                    std::to_string(cols.size()));
    }
    const std::string& id = cols[0];
    if (auto dash = id.find('-'); dash != std::string::npos) {
      auto start = parse_int(std::string_view(id).substr(0, dash));
      auto end = parse_int(std::string_view(id).substr(dash + 1));
      if (!start || !end || *start > *end) {
        throw ParseError(line_no, "invalid multiword range '" + id + "'");
      }
      const int next = pending.sentence.size() + 1;
      if (*start != next) {
        throw ParseError(line_no, "multiword range '" + id + "' must precede word " +
                                      std::to_string(*start));
      }
      MultiwordToken m;
      m.start = *start;
      m.end = *end;
      m.surface = cols[1];
      m.misc = cols[9];
      m.line = std::string(line);
      pending.sentence.mwt_ranges.push_back(std::move(m));
      continue;
    }
    if (auto dot = id.find('.'); dot != std::string::npos) {
      if (opts.strict) throw ParseError(line_no, "empty node '" + id + "' in strict mode");
      auto major = parse_int(std::string_view(id).substr(0, dot));
      if (!major || *major != pending.sentence.size()) {
        throw ParseError(line_no, "misplaced empty node '" + id + "'");
      }
      pending.sentence.empty_nodes.push_back(EmptyNode{*major, std::string(line)});
      continue;
    }
    parse_word_line(cols, line_no, pending);
  }
  finish_sentence(pending, opts, out);
  return out;
}

std::vector<Sentence> read_conllu_string(std::string_view text, const ReadOptions& opts) {
  std::istringstream in{std::string(text)};
  return read_conllu(in, opts);
}

std::vector<Sentence> read_conllu_file(const std::string& path, const ReadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return read_conllu(in, opts);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_conllu(const std::vector<Sentence>& sentences, std::ostream& out,
                  const WriteOptions& opts) {
  for (const Sentence& s : sentences) {
    for (const std::string& c : s.comments) out << c << '\n';
    auto write_empty = [&](int after) {
      for (const EmptyNode& e : s.empty_nodes) {
        if (e.after == after) out << e.line << '\n';
      }
    };
    write_empty(0);
    for (const Token& t : s.tokens) {
      for (const MultiwordToken& m : s.mwt_ranges) {
        if (m.start == t.id) out << m.line << '\n';
      }
      if (opts.require_heads && (!t.head || !t.deprel)) {
        throw InvalidArgument("word " + std::to_string(t.id) + " ('" + t.form +
                              "') has no head or deprel");
      }
      out << t.id << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << '\t' << t.xpos
          << '\t' << t.feats << '\t' << (t.head ? std::to_string(*t.head) : "_") << '\t'
          << (t.deprel ? *t.deprel : "_") << '\t' << t.deps << '\t' << t.misc << '\n';
      write_empty(t.id);
    }
    out << '\n';
  }
}

std::string write_conllu_string(const std::vector<Sentence>& sentences,
                                const WriteOptions& opts) {
  std::ostringstream out;
  write_conllu(sentences, out, opts);
  return out.str();
}

void write_conllu_file(const std::vector<Sentence>& sentences, const std::string& path,
                       const WriteOptions& opts) {
  std::string text = write_conllu_string(sentences, opts);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("error writing '" + path + "'");
}

std::string validate_heads(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size()) - 1;
  if (n < 1) return "tree has no words";
  for (int d = 1; d <= n; ++d) {
    if (heads[d] < 0) return "word " + std::to_string(d) + " has no head";
    if (heads[d] > n) return "word " + std::to_string(d) + " has head out of range";
    if (heads[d] == d) return "word " + std::to_string(d) + " is its own head";
  }
  // Every word must reach node 0 by following heads; 0 = unknown, 1 = on the
  // current path, 2 = known to reach the root.
  std::vector<char> state(n + 1, 0);
  state[0] = 2;
  for (int d = 1; d <= n; ++d) {
    int v = d;
    std::vector<int> path;
    while (state[v] == 0) {
      state[v] = 1;
      path.push_back(v);
      v = heads[v];
    }
    if (state[v] == 1) return "cycle through word " + std::to_string(v);
    for (int p : path) state[p] = 2;
  }
  return {};
}

GoldTree::GoldTree(int n, std::vector<Arc> arcs)
    : n_(n), heads_(n + 1, -1), labels_(n + 1) {
  if (n < 1) throw InvalidArgument("a tree needs at least one word");
  for (Arc& a : arcs) {
    if (a.dep < 1 || a.dep > n) {
      throw InvalidArgument("arc dependent " + std::to_string(a.dep) + " out of range");
    }
    if (a.head < 0 || a.head > n) {
      throw InvalidArgument("arc head " + std::to_string(a.head) + " out of range");
    }
    if (heads_[a.dep] >= 0) {
      throw InvalidArgument("word " + std::to_string(a.dep) + " has several heads");
    }
    heads_[a.dep] = a.head;
    labels_[a.dep] = std::move(a.label);
  }
  if (std::string why = validate_heads(heads_); !why.empty()) throw InvalidArgument(why);
}

GoldTree GoldTree::from_sentence(const Sentence& sentence) {
  std::vector<Arc> arcs;
  arcs.reserve(sentence.tokens.size());
  for (const Token& t : sentence.tokens) {
    if (!t.head || !t.deprel) {
      throw DataError("word " + std::to_string(t.id) + " ('" + t.form +
                      "') has no gold head or deprel");
    }
    arcs.push_back(Arc{*t.head, *t.deprel, t.id});
  }
  try {
    return GoldTree(sentence.size(), std::move(arcs));
  } catch (const InvalidArgument& e) {
    std::string id;
    for (const std::string& c : sentence.comments) {
      if (c.rfind("# sent_id", 0) == 0) id = " (" + c + ")";
    }
    throw DataError(std::string("invalid gold tree") + id + ": " + e.what());
  }
}

GoldTree GoldTree::from_heads(const std::vector<int>& heads,
                              const std::vector<std::string>& labels) {
  const int n = static_cast<int>(heads.size()) - 1;
  std::vector<Arc> arcs;
  for (int d = 1; d <= n; ++d) {
    arcs.push_back(Arc{heads[d], d < static_cast<int>(labels.size()) ? labels[d] : "dep", d});
  }
  return GoldTree(n, std::move(arcs));
}

std::vector<Arc> GoldTree::arcs() const {
  std::vector<Arc> out;
  out.reserve(n_);
  for (int d = 1; d <= n_; ++d) out.push_back(Arc{heads_[d], labels_[d], d});
  return out;
}

bool is_nonprojective(const GoldTree& tree) {
  // Sweep the arc spans as a bracket sequence: crossing spans are exactly
  // those that cannot be closed in stack order.
  struct Span {
    int left, right;
  };
  std::vector<Span> spans;
  for (int d = 1; d <= tree.n(); ++d) {
    int h = tree.head(d);
    spans.push_back({std::min(h, d), std::max(h, d)});
  }
  // Opening order: by left end, wider spans first.
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
    return a.left != b.left ? a.left < b.left : a.right > b.right;
  });
  std::vector<int> open_right;  // right ends of open spans
  std::vector<int> open_count(tree.n() + 1, 0);
  std::size_t next = 0;
  for (int p = 0; p <= tree.n(); ++p) {
    while (!open_right.empty() && open_right.back() == p) {
      open_right.pop_back();
      --open_count[p];
    }
    if (open_count[p] > 0) return true;
    for (; next < spans.size() && spans[next].left == p; ++next) {
      open_right.push_back(spans[next].right);
      ++open_count[spans[next].right];
    }
  }
  return false;
}

}  // namespace covparse
