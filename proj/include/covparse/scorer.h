#ifndef COVPARSE_SCORER_H_
#define COVPARSE_SCORER_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "covparse/nn/graph.h"
#include "covparse/nn/layers.h"
#include "covparse/nn/tensor.h"
#include "covparse/transition_system.h"
#include "covparse/treebank.h"

namespace covparse {

// Dense symbol table with per-symbol counts. The first entries are reserved
// symbols chosen by the owner.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> reserved, std::optional<std::size_t> unk);
  static Vocabulary with_counts(std::vector<std::string> symbols, std::vector<long> counts,
                                std::size_t reserved, std::optional<std::size_t> unk);

  // Interns `symbol` and bumps its count.
  std::size_t add(const std::string& symbol);
  std::optional<std::size_t> find(const std::string& symbol) const;
  // Unknown symbols map to the UNK entry; throws if the table has none.
  std::size_t lookup(const std::string& symbol) const;

  std::size_t size() const { return symbols_.size(); }
  std::size_t reserved() const { return reserved_; }
  std::optional<std::size_t> unk() const { return unk_; }
  const std::string& symbol(std::size_t index) const { return symbols_.at(index); }
  long count(std::size_t index) const { return counts_.at(index); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::vector<long>& counts() const { return counts_; }

  bool operator==(const Vocabulary&) const = default;

 private:
  std::vector<std::string> symbols_;
  std::vector<long> counts_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t reserved_ = 0;
  std::optional<std::size_t> unk_;
};

inline constexpr std::size_t kPadIndex = 0;   // words
inline constexpr std::size_t kNoneIndex = 0;  // tag columns that read "_"
inline constexpr std::size_t kUnkIndex = 1;   // words and tag columns

struct Vocabularies {
  Vocabulary words;
  Vocabulary upos;
  Vocabulary xpos;
  Vocabulary feats;
  Vocabulary labels;  // closed; no UNK
  long min_count = 1;
  // A tag channel exists only if the training data has a value in it.
  bool has_upos = false;
  bool has_xpos = false;
  bool has_feats = false;

  // Word index after the min_count cut-off.
  std::size_t word_index(const std::string& form) const;
  std::size_t tag_index(const Vocabulary& vocab, const std::string& value) const;

  bool operator==(const Vocabularies&) const = default;
};

Vocabularies build_vocab(const std::vector<Sentence>& corpus, long min_count = 1);

struct Hyperparams {
  std::size_t dim_word = 100;
  std::size_t dim_upos = 25;
  std::size_t dim_xpos = 25;
  std::size_t dim_feats = 25;
  std::size_t dim_external = 100;
  std::size_t bilstm_out = 512;
  std::size_t bilstm_layers = 2;
  std::size_t mlp_hidden = 100;
  // Feature window: first x of the buffer, last y of lambda1, first z and
  // last v of lambda2.
  std::size_t window_x = 1;
  std::size_t window_y = 3;
  std::size_t window_z = 1;
  std::size_t window_v = 1;
  int epochs = 30;
  double p_explore = 0.9;
  double explore_margin = 1.0;
  double word_dropout_alpha = 0.25;
  long min_count = 1;
  double learning_rate = 0.001;

  // Empty when valid, else the first problem.
  std::string validate() const;
  std::size_t slots() const { return window_x + window_y + window_z + window_v; }

  bool operator==(const Hyperparams&) const = default;
};

// Pretrained vectors keyed by word form.
struct ExternalEmbeddings {
  std::vector<std::string> words;
  std::size_t dim = 0;
  std::vector<double> values;  // words.size() x dim, row-major
};

// Reads "word v1 ... vd" lines with an optional "count dim" header. Throws
// DataError on malformed input or when the dimension differs from `dim`.
ExternalEmbeddings load_external_embeddings(const std::string& path, std::size_t dim);
ExternalEmbeddings parse_external_embeddings(std::istream& in, std::size_t dim);

class Model {
 public:
  // Fresh parameters drawn from `seed`. Without external embeddings the
  // external channel is absent altogether.
  static Model create(const Hyperparams& hp, Vocabularies vocab, std::uint64_t seed,
                      const ExternalEmbeddings* external = nullptr);
  // Rebinds a model from stored parameters; `external_words` lists the
  // rows of the external table after the zero row.
  static Model assemble(const Hyperparams& hp, Vocabularies vocab,
                        std::vector<std::string> external_words, nn::ParameterStore store);

  const Hyperparams& hyperparams() const { return hp_; }
  const Vocabularies& vocab() const { return vocab_; }
  nn::ParameterStore& store() { return store_; }
  const nn::ParameterStore& store() const { return store_; }
  const std::vector<std::string>& external_words() const { return external_words_; }
  bool has_external() const { return external_.has_value(); }

  std::size_t input_dim() const { return input_dim_; }
  std::size_t feature_dim() const { return hp_.slots() * hp_.bilstm_out; }
  std::size_t label_count() const { return vocab_.labels.size(); }

  // Contexts for nodes 0..n (index 0 is the root). With `dropout_rng` set,
  // words are replaced by UNK with probability alpha / (alpha + count).
  std::vector<nn::Var> encode_sentence(nn::Graph& g, const Sentence& sentence,
                                       std::mt19937_64* dropout_rng = nullptr) const;
  // Concatenated context vectors for the feature window of `c`.
  nn::Var feature_vector(nn::Graph& g, const std::vector<nn::Var>& contexts,
                         const Configuration& c) const;
  // Four scores in TransitionKind order.
  nn::Var score_transitions(nn::Graph& g, nn::Var h) const;
  // One score per label.
  nn::Var score_labels(nn::Graph& g, nn::Var h) const;

 private:
  Model() = default;
  void bind();
  nn::Var word_input(nn::Graph& g, const Token& token, std::mt19937_64* dropout_rng) const;

  Hyperparams hp_;
  Vocabularies vocab_;
  nn::ParameterStore store_;
  std::vector<std::string> external_words_;
  std::unordered_map<std::string, std::size_t> external_index_;

  std::size_t input_dim_ = 0;
  nn::ParamId word_table_;
  std::optional<nn::ParamId> upos_table_, xpos_table_, feats_table_, external_;
  nn::ParamId root_input_;
  nn::ParamId pad_feature_;
  std::vector<nn::BiLstmLayer> bilstm_;
  nn::MlpParams transition_mlp_;
  nn::MlpParams label_mlp_;
};

// Node indices for each feature slot of `c`; -1 marks an empty slot. Slot
// order is the buffer window, then lambda1 (padded on the left), then the
// first z of lambda2 (padded on the right) and the last v of lambda2
// (padded on the left).
std::vector<int> feature_slots(const Configuration& c, const Hyperparams& hp);

}  // namespace covparse

#endif  // COVPARSE_SCORER_H_
