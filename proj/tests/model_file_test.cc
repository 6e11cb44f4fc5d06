#include <sstream>

#include "covparse/error.h"
#include "covparse/evaluation.h"
#include "covparse/model_file.h"
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
  hp.dim_external = 3;
  hp.bilstm_out = 16;
  hp.bilstm_layers = 2;
  hp.mlp_hidden = 12;
  hp.learning_rate = 0.01;
  return hp;
}

std::string bytes_of(const Model& m) {
  std::ostringstream out;
  save_model(m, out);
  return out.str();
}

Model from_bytes(const std::string& bytes) {
  std::istringstream in(bytes);
  return load_model(in);
}

TEST_CASE("model files round-trip byte for byte") {
  auto corpus = read_conllu_file(data_path("fixture50.conllu"));
  corpus.resize(12);
  ExternalEmbeddings ext{{"The", "cat", "dog"}, 3, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}};
  for (bool with_external : {false, true}) {
    Model m = Model::create(tiny(), build_vocab(corpus, 2), 3, with_external ? &ext : nullptr);
    TrainConfig cfg = TrainConfig::from(m.hyperparams(), 1);
    cfg.epochs = 2;
    train(m, corpus, cfg);
    const std::string first = bytes_of(m);
    CHECK(first.compare(0, 8, "COVPARSE") == 0);
    Model loaded = from_bytes(first);
    CHECK(bytes_of(loaded) == first);
    CHECK(loaded.vocab() == m.vocab());
    CHECK(loaded.hyperparams() == m.hyperparams());
    CHECK(loaded.has_external() == with_external);
    CHECK(loaded.input_dim() == m.input_dim());

    // Scores after a save/load cycle match up to 32-bit rounding.
    nn::Graph ga(m.store()), gb(loaded.store());
    auto ca = m.encode_sentence(ga, corpus[0]);
    auto cb = loaded.encode_sentence(gb, corpus[0]);
    Configuration c = initial_config(corpus[0].size());
    auto sa = ga.value(m.score_transitions(ga, m.feature_vector(ga, ca, c)));
    auto sb = gb.value(loaded.score_transitions(gb, loaded.feature_vector(gb, cb, c)));
    for (int k = 0; k < 4; ++k) CHECK(sa[k] == doctest::Approx(sb[k]).epsilon(1e-5));
    auto pa = parse_corpus(m, corpus), pb = parse_corpus(loaded, corpus);
    CHECK(std::abs(evaluate(pa, corpus).las - evaluate(pb, corpus).las) <= 1e-6);
  }
}

TEST_CASE("model file errors") {
  auto corpus = read_conllu_file(data_path("fixture50.conllu"));
  Model m = Model::create(tiny(), build_vocab(corpus), 1);
  const std::string good = bytes_of(m);

  SUBCASE("version mismatch") {
    std::string bad = good;
    bad[8] = 2;
    try {
      from_bytes(bad);
      FAIL("expected an error");
    } catch (const ModelError& e) {
      CHECK(std::string(e.what()).find("version 2 is not supported") != std::string::npos);
    }
  }
  SUBCASE("magic") {
    std::string bad = good;
    bad[0] = 'X';
    CHECK_THROWS_AS(from_bytes(bad), ModelError);
    CHECK_THROWS_AS(from_bytes(""), ModelError);
  }
  SUBCASE("truncation and trailing bytes") {
    CHECK_THROWS_AS(from_bytes(good.substr(0, good.size() - 3)), ModelError);
    CHECK_THROWS_AS(from_bytes(good.substr(0, 40)), ModelError);
    CHECK_THROWS_AS(from_bytes(good + "x"), ModelError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_model_file("/nonexistent/model.bin"), ModelError); }
}

TEST_CASE("hyperparameter JSON") {
  Hyperparams hp;
  hp.epochs = 100;
  hp.p_explore = 0.25;
  CHECK(hyperparams_from_json(hyperparams_to_json(hp)) == hp);
  Hyperparams partial = hyperparams_from_json(R"({"bilstm_out": 256, "mlp_hidden": 7})");
  CHECK(partial.bilstm_out == 256);
  CHECK(partial.mlp_hidden == 7);
  CHECK(partial.dim_word == 100);
  CHECK_THROWS_AS(hyperparams_from_json(R"({"bilstm": 256})"), InvalidArgument);
  CHECK_THROWS_AS(hyperparams_from_json(R"({"bilstm_out": -2})"), InvalidArgument);
  CHECK_THROWS_AS(hyperparams_from_json(R"({"epochs": "ten"})"), InvalidArgument);
  CHECK_THROWS_AS(hyperparams_from_json("{"), InvalidArgument);
}

TEST_CASE("defaults mirror the published setup") {
  Hyperparams hp;
  CHECK(hp.dim_word == 100);
  CHECK(hp.dim_upos == 25);
  CHECK(hp.dim_xpos == 25);
  CHECK(hp.dim_feats == 25);
  CHECK(hp.dim_external == 100);
  CHECK(hp.bilstm_out == 512);
  CHECK(hp.epochs == 30);
  CHECK(hp.window_x == 1);
  CHECK(hp.window_y == 3);
  CHECK(hp.window_z == 1);
  CHECK(hp.window_v == 1);
}

}  // namespace
}  // namespace covparse
