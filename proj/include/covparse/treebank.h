#ifndef COVPARSE_TREEBANK_H_
#define COVPARSE_TREEBANK_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace covparse {

// One syntactic word line of a CoNLL-U sentence.
struct Token {
  int id = 0;  // 1-based
  std::string form;
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::string feats = "_";
  std::optional<int> head;
  std::optional<std::string> deprel;
  std::string deps = "_";
  std::string misc = "_";

  bool operator==(const Token&) const = default;
};

// A multiword token range line such as "1-2\tdel\t_\t...". The original
// line is kept so that it can be reproduced byte for byte.
struct MultiwordToken {
  int start = 0;
  int end = 0;
  std::string surface;
  std::string misc = "_";
  std::string line;

  bool operator==(const MultiwordToken&) const = default;
};

// An enhanced-graph empty node ("5.1"). Only carried in lenient mode and
// never touched by the parser.
struct EmptyNode {
  int after = 0;  // word index the node follows (0 = before the first word)
  std::string line;

  bool operator==(const EmptyNode&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<std::string> comments;  // full lines including the leading '#'
  std::vector<MultiwordToken> mwt_ranges;
  std::vector<EmptyNode> empty_nodes;

  int size() const { return static_cast<int>(tokens.size()); }
  bool operator==(const Sentence&) const = default;
};

struct ReadOptions {
  // Strict mode rejects empty nodes and sentences with more than one word
  // attached to the root. Lenient mode passes empty nodes through and
  // accepts any number of root attachments.
  bool strict = true;
};

struct WriteOptions {
  // When set, every token must carry a head and a deprel.
  bool require_heads = true;
};

std::vector<Sentence> read_conllu(std::istream& in, const ReadOptions& opts = {});
std::vector<Sentence> read_conllu_string(std::string_view text, const ReadOptions& opts = {});
std::vector<Sentence> read_conllu_file(const std::string& path, const ReadOptions& opts = {});

void write_conllu(const std::vector<Sentence>& sentences, std::ostream& out,
                  const WriteOptions& opts = {});
std::string write_conllu_string(const std::vector<Sentence>& sentences,
                                const WriteOptions& opts = {});
void write_conllu_file(const std::vector<Sentence>& sentences, const std::string& path,
                       const WriteOptions& opts = {});

// A labeled dependency (head --label--> dep).
struct Arc {
  int head = 0;
  std::string label;
  int dep = 0;

  bool operator==(const Arc&) const = default;
};

// A dependency tree over nodes 0..n with node 0 the dummy root. Every word
// has exactly one head and all words are reachable from node 0. Several
// words may attach to node 0.
class GoldTree {
 public:
  // Throws InvalidArgument unless the arcs form a tree as described above.
  GoldTree(int n, std::vector<Arc> arcs);

  // Builds the tree from the HEAD and DEPREL columns.
  static GoldTree from_sentence(const Sentence& sentence);
  // Builds a tree from a 1-based head vector (heads[0] is ignored).
  static GoldTree from_heads(const std::vector<int>& heads,
                             const std::vector<std::string>& labels);

  int n() const { return n_; }
  int head(int dep) const { return heads_[dep]; }
  const std::string& label(int dep) const { return labels_[dep]; }
  // Arcs ordered by dependent.
  std::vector<Arc> arcs() const;
  const std::vector<int>& heads() const { return heads_; }

 private:
  int n_;
  std::vector<int> heads_;  // heads_[0] == -1
  std::vector<std::string> labels_;
};

// Returns an empty string when the head assignment is a tree rooted at 0,
// otherwise a description of the first violation found. heads[0] is ignored;
// a negative head means "missing".
std::string validate_heads(const std::vector<int>& heads);

// True iff two arcs cross when drawn above the sentence.
bool is_nonprojective(const GoldTree& tree);

}  // namespace covparse

#endif  // COVPARSE_TREEBANK_H_
