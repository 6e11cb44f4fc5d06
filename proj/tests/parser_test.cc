#include <algorithm>
#include <random>

#include "covparse/error.h"
#include "covparse/evaluation.h"
#include "covparse/parser.h"
#include "doctest.h"
#include "test_util.h"

namespace covparse {
namespace {

using testing::data_path;

Hyperparams tiny() {
  Hyperparams hp;
  hp.dim_word = 8;
  hp.dim_upos = 4;
  hp.dim_xpos = 4;
  hp.dim_feats = 4;
  hp.bilstm_out = 16;
  hp.bilstm_layers = 1;
  hp.mlp_hidden = 16;
  hp.learning_rate = 0.01;
  return hp;
}

std::vector<Sentence> fixture() { return read_conllu_file(data_path("fixture50.conllu")); }

bool same_parameters(const Model& a, const Model& b) {
  const auto& pa = a.store().params();
  const auto& pb = b.store().params();
  if (pa.size() != pb.size()) return false;
  for (std::size_t k = 0; k < pa.size(); ++k) {
    if (pa[k].value != pb[k].value) return false;
  }
  return true;
}

// Random forest over n words: each word picks a head among 0 and earlier
// nodes of a random permutation, so the result is acyclic.
std::vector<int> random_forest(int n, std::mt19937_64& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) order[k] = k + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> heads(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    std::uniform_int_distribution<int> pick(-1, k - 1);
    const int p = pick(rng);
    heads[order[k] - 1] = p < 0 ? 0 : order[p];
  }
  return heads;
}

std::vector<std::string> random_upos(int n, std::mt19937_64& rng) {
  static const std::vector<std::string> tags = {"NOUN", "VERB", "ADJ", "ADV", "PRON"};
  std::vector<std::string> out;
  for (int k = 0; k < n; ++k) out.push_back(tags[rng() % tags.size()]);
  return out;
}

TEST_CASE("postprocess_single_root fixtures") {
  CHECK(postprocess_single_root({0, 0, 2}, {"NOUN", "VERB", "ADV"}) == std::vector<int>{2, 0, 2});
  CHECK(postprocess_single_root({0, 0}, {"NOUN", "NOUN"}) == std::vector<int>{0, 1});
  CHECK(postprocess_single_root({2, 0, 2}, {"NOUN", "VERB", "ADV"}) == std::vector<int>{2, 0, 2});
  // The first verb wins when several verbs hang from the root.
  CHECK(postprocess_single_root({0, 0, 0}, {"NOUN", "VERB", "VERB"}) == std::vector<int>{2, 0, 2});
  CHECK_THROWS_AS(postprocess_single_root({1, 1}, {"NOUN", "NOUN"}), InvalidArgument);
  CHECK_THROWS_AS(postprocess_single_root({0, 3}, {"NOUN", "NOUN"}), InvalidArgument);
  CHECK_THROWS_AS(postprocess_single_root({0}, {"NOUN", "NOUN"}), InvalidArgument);
}

TEST_CASE("postprocess_single_root relabels") {
  std::vector<int> heads = {0, 0, 2};
  std::vector<std::string> labels = {"nsubj", "dep", "advmod"};
  std::vector<std::string> upos = {"NOUN", "VERB", "ADV"};
  postprocess_single_root(heads, labels, upos, "parataxis");
  CHECK(heads == std::vector<int>{2, 0, 2});
  CHECK(labels == std::vector<std::string>{"parataxis", "root", "advmod"});
}

TEST_CASE("postprocess_single_root on random forests") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const std::vector<int> heads = random_forest(n, rng);
    const auto upos = random_upos(n, rng);
    const std::vector<int> once = postprocess_single_root(heads, upos);
    CHECK(std::count(once.begin(), once.end(), 0) == 1);
    std::vector<int> full = {-1};
    full.insert(full.end(), once.begin(), once.end());
    CHECK(validate_heads(full).empty());
    CHECK(postprocess_single_root(once, upos) == once);
    for (int k = 0; k < n; ++k) {
      if (heads[k] != 0) CHECK(once[k] == heads[k]);
    }
  }
}

TEST_CASE("parse_sentence output is always a single-rooted tree") {
  auto corpus = fixture();
  Model m = Model::create(tiny(), build_vocab(corpus), 2);
  for (const Sentence& s : corpus) {
    ParseResult p = parse_sentence(m, s);
    CHECK(validate_heads(p.heads).empty());
    CHECK(std::count(p.heads.begin() + 1, p.heads.end(), 0) == 1);
    CHECK(p.transitions <= max_transitions(s.size()));
    for (std::size_t d = 1; d < p.labels.size(); ++d) {
      CHECK((p.labels[d] == "root") == (p.heads[d] == 0));
    }
    CHECK(p.heads == parse_sentence(m, s).heads);
  }
}

TEST_CASE("all-equal scores decode deterministically") {
  auto corpus = fixture();
  Model m = Model::create(tiny(), build_vocab(corpus), 2);
  m.store().value(m.store().find("mlp.transition.w2")).fill(0.0);
  m.store().value(m.store().find("mlp.transition.b2")).fill(0.0);
  // Ties go to LEFT_ARC, then RIGHT_ARC. Word j first meets j - 1, which is
  // already headed (or is node 0), so RIGHT_ARC builds a left-to-right chain.
  ParseOptions raw;
  raw.single_root = false;
  ParseResult p = parse_sentence(m, corpus[0], raw);
  for (int d = 1; d <= corpus[0].size(); ++d) CHECK(p.heads[d] == d - 1);
}

TEST_CASE("with_parse only touches HEAD and DEPREL") {
  auto corpus = fixture();
  Model m = Model::create(tiny(), build_vocab(corpus), 2);
  Sentence out = with_parse(corpus[3], parse_sentence(m, corpus[3]));
  REQUIRE(out.tokens.size() == corpus[3].tokens.size());
  CHECK(out.comments == corpus[3].comments);
  for (std::size_t k = 0; k < out.tokens.size(); ++k) {
    Token a = out.tokens[k], b = corpus[3].tokens[k];
    a.head = b.head;
    a.deprel = b.deprel;
    CHECK(a == b);
  }
  CHECK_THROWS_AS(with_parse(corpus[0], parse_sentence(m, corpus[3])), InvalidArgument);
}

TEST_CASE("parallel parsing preserves order and output") {
  auto corpus = fixture();
  Model m = Model::create(tiny(), build_vocab(corpus), 4);
  auto one = parse_corpus(m, corpus, 1);
  auto four = parse_corpus(m, corpus, 4);
  CHECK(write_conllu_string(one) == write_conllu_string(four));
  CHECK(parse_corpus(m, {}, 4).empty());
}

TEST_CASE("a single training sentence is learned exactly") {
  auto corpus = fixture();
  std::vector<Sentence> one = {corpus[20]};
  Model m = Model::create(tiny(), build_vocab(one), 3);
  TrainConfig cfg = TrainConfig::from(m.hyperparams(), 5);
  cfg.epochs = 50;
  auto history = train(m, one, cfg);
  CHECK(history.back().train_las == 100.0);
  ParseResult p = parse_sentence(m, one[0]);
  CHECK(p.heads == GoldTree::from_sentence(one[0]).heads());
  for (int d = 1; d <= one[0].size(); ++d) CHECK(p.labels[d] == *one[0].tokens[d - 1].deprel);
}

TEST_CASE("training without exploration walks only zero-cost transitions") {
  auto corpus = fixture();
  corpus.resize(10);
  Model m = Model::create(tiny(), build_vocab(corpus), 3);
  TrainConfig cfg = TrainConfig::from(m.hyperparams(), 5);
  cfg.epochs = 3;
  cfg.exploration.p_explore = 0.0;
  for (const EpochMetrics& e : train(m, corpus, cfg)) CHECK(e.explored == 0);
  cfg.exploration.p_explore = 1.0;
  cfg.exploration.margin = 1e9;
  Model fresh = Model::create(tiny(), build_vocab(corpus), 3);
  auto history = train(fresh, corpus, cfg);
  CHECK(history[0].explored == 0);
  CHECK(history[1].explored > 0);
}

TEST_CASE("training is deterministic for a fixed seed") {
  auto corpus = fixture();
  corpus.resize(8);
  auto run = [&](std::vector<EpochMetrics>& metrics) {
    Model m = Model::create(tiny(), build_vocab(corpus), 9);
    TrainConfig cfg = TrainConfig::from(m.hyperparams(), 13);
    cfg.epochs = 3;
    metrics = train(m, corpus, cfg);
    return m;
  };
  std::vector<EpochMetrics> a, b;
  Model ma = run(a), mb = run(b);
  CHECK(same_parameters(ma, mb));
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].loss == b[k].loss);
    CHECK(a[k].train_las == b[k].train_las);
  }
}

TEST_CASE("dev data never drives an update") {
  auto corpus = fixture();
  std::vector<Sentence> train_set(corpus.begin(), corpus.begin() + 8);
  std::vector<Sentence> dev(corpus.begin() + 40, corpus.end());
  Model with_dev = Model::create(tiny(), build_vocab(train_set), 4);
  Model without = with_dev;
  TrainConfig cfg = TrainConfig::from(with_dev.hyperparams(), 2);
  cfg.epochs = 2;
  auto plain = train(without, train_set, cfg);
  cfg.dev = &dev;
  auto history = train(with_dev, train_set, cfg);
  for (const EpochMetrics& e : history) {
    CHECK(e.dev_las.has_value());
    CHECK(e.optimizer_steps == e.optimizer_steps_after_dev);
  }
  CHECK_FALSE(plain[0].dev_las.has_value());
  CHECK(same_parameters(with_dev, without));
}

TEST_CASE("training loss trends downward") {
  auto corpus = fixture();
  corpus.resize(10);
  int decreasing = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Model m = Model::create(tiny(), build_vocab(corpus), seed);
    TrainConfig cfg = TrainConfig::from(m.hyperparams(), seed);
    cfg.epochs = 10;
    auto h = train(m, corpus, cfg);
    const double first = h[0].loss + h[1].loss + h[2].loss;
    const double last = h[7].loss + h[8].loss + h[9].loss;
    if (last <= first) ++decreasing;
  }
  CHECK(decreasing >= 8);
}

TEST_CASE("training input errors") {
  Model m = Model::create(tiny(), build_vocab(fixture()), 1);
  TrainConfig cfg;
  CHECK_THROWS_AS(train(m, {}, cfg), DataError);
  auto broken = fixture();
  broken[2].tokens[1].head.reset();
  CHECK_THROWS_AS(train(m, broken, cfg), DataError);
}

}  // namespace
}  // namespace covparse
