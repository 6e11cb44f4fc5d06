#ifndef COVPARSE_PARSER_H_
#define COVPARSE_PARSER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covparse/oracle.h"
#include "covparse/scorer.h"
#include "covparse/treebank.h"

namespace covparse {

struct EpochMetrics {
  int epoch = 0;
  double loss = 0.0;       // sum of hinge terms over the epoch
  double train_las = 0.0;  // re-parse of a sample of the training set
  std::optional<double> dev_las;
  long transitions = 0;
  long explored = 0;  // loss-increasing transitions taken on purpose
  long optimizer_steps = 0;
  // Optimizer steps counted again after the dev pass; equal by construction.
  long optimizer_steps_after_dev = 0;
};

struct TrainConfig {
  int epochs = 30;
  std::uint64_t seed = 1;
  ExplorationPolicy exploration;
  // Exploration is disabled in earlier epochs.
  int explore_from_epoch = 2;
  double hinge_margin = 1.0;
  // Sentences re-parsed per epoch for the training LAS; 0 means all.
  std::size_t las_sample = 200;
  // Scored after every epoch; never used for updates.
  const std::vector<Sentence>* dev = nullptr;
  // Called after every epoch, e.g. for logging or checkpoints.
  std::function<void(const EpochMetrics&, const Model&)> on_epoch;

  static TrainConfig from(const Hyperparams& hp, std::uint64_t seed);
};

// Trains `model` in place on gold trees. Throws DataError for sentences
// without a complete tree.
std::vector<EpochMetrics> train(Model& model, const std::vector<Sentence>& corpus,
                                const TrainConfig& cfg);

struct ParseOptions {
  bool single_root = true;
  std::string extra_root_label = "parataxis";
};

struct ParseResult {
  std::vector<int> heads;  // 1-based; heads[0] == -1
  std::vector<std::string> labels;
  long transitions = 0;
};

// Greedy decoding. Words left without a head attach to node 0 as "root"
// before the optional single-root repair.
ParseResult parse_sentence(const Model& model, const Sentence& sentence,
                           const ParseOptions& opts = {});

// Copy of `sentence` with HEAD and DEPREL taken from `parse`.
Sentence with_parse(const Sentence& sentence, const ParseResult& parse);

// Parses every sentence with up to `jobs` worker threads; output order
// matches input order.
std::vector<Sentence> parse_corpus(const Model& model, const std::vector<Sentence>& sentences,
                                   int jobs = 1, const ParseOptions& opts = {});

// Word-indexed heads (heads[k] is the head of word k + 1). When several
// words hang from node 0, keeps the first VERB among them (else the first
// one) and attaches the others to it.
std::vector<int> postprocess_single_root(std::vector<int> heads,
                                         const std::vector<std::string>& upos);

// Same repair, also relabeling reattached words with `extra_root_label` and
// the surviving root with "root".
void postprocess_single_root(std::span<int> heads, std::span<std::string> labels,
                             std::span<const std::string> upos,
                             const std::string& extra_root_label = "parataxis");

}  // namespace covparse

#endif  // COVPARSE_PARSER_H_
