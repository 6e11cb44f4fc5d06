#include "covparse/parser.h"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

#include "covparse/error.h"
#include "covparse/evaluation.h"
#include "covparse/nn/adam.h"

namespace covparse {
namespace {

TransitionScores to_scores(std::span<const double> v) { return {v[0], v[1], v[2], v[3]}; }

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Index of the best entry other than `skip`.
std::size_t argmax_except(std::span<const double> v, std::size_t skip) {
  std::size_t best = skip == 0 ? 1 : 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k != skip && v[k] > v[best]) best = k;
  }
  return best;
}

struct SentenceLoss {
  double value = 0.0;
  long transitions = 0;
  long explored = 0;
};

SentenceLoss train_sentence(const Model& model, const Sentence& sentence, const GoldTree& gold,
                            const TrainConfig& cfg, bool explore, nn::Gradients& grads,
                            std::mt19937_64& rng) {
  nn::Graph g(model.store(), &grads);
  auto contexts = model.encode_sentence(g, sentence, &rng);
  std::vector<nn::Var> terms;
  SentenceLoss out;
  Configuration c = initial_config(gold.n());
  while (!c.is_final()) {
    ++out.transitions;
    const TransitionSet legal = legal_transitions(c);
    if (legal.size() == 1) {
      c = apply(c, Transition::shift());
      continue;
    }
    const TransitionSet zero = zero_cost_transitions(c, gold);
    nn::Var h = model.feature_vector(g, contexts, c);
    nn::Var scores = model.score_transitions(g, h);
    const TransitionScores sc = to_scores(g.value(scores));
    const TransitionKind best_zero = best_scoring(sc, zero);
    TransitionSet wrong;
    for (TransitionKind k : legal.kinds()) {
      if (!zero.contains(k)) wrong.insert(k);
    }
    if (!wrong.empty()) {
      const TransitionKind best_wrong = best_scoring(sc, wrong);
      const auto bw = static_cast<std::size_t>(best_wrong);
      const auto bz = static_cast<std::size_t>(best_zero);
      if (cfg.hinge_margin + sc[bw] - sc[bz] > 0) {
        terms.push_back(g.add_scalar(g.sub(g.pick(scores, bw), g.pick(scores, bz)), cfg.hinge_margin));
      }
    }
    const TransitionKind kind =
        explore ? explore_next(sc, legal, zero, cfg.exploration, rng) : best_zero;
    if (!zero.contains(kind)) ++out.explored;
    std::string label;
    if (is_arc(kind)) {
      label = oracle_label(c, gold, kind);
      if (auto gi = model.vocab().labels.find(label); gi && model.label_count() > 1) {
        nn::Var ls = model.score_labels(g, h);
        const std::size_t other = argmax_except(g.value(ls), *gi);
        if (cfg.hinge_margin + g.value(ls)[other] - g.value(ls)[*gi] > 0) {
          terms.push_back(g.add_scalar(g.sub(g.pick(ls, other), g.pick(ls, *gi)), cfg.hinge_margin));
        }
      }
    }
    c = apply(c, Transition{kind, std::move(label)});
  }
  if (!terms.empty()) {
    nn::Var total = g.sum(terms);
    out.value = g.scalar(total);
    g.backward(total);
  }
  return out;
}

double sample_las(const Model& model, const std::vector<Sentence>& corpus, std::size_t sample,
                  std::uint64_t seed) {
  std::vector<std::size_t> picks(corpus.size());
  std::iota(picks.begin(), picks.end(), 0);
  if (sample > 0 && sample < corpus.size()) {
    std::mt19937_64 rng(seed);
    std::shuffle(picks.begin(), picks.end(), rng);
    picks.resize(sample);
    std::sort(picks.begin(), picks.end());
  }
  std::vector<Sentence> gold, system;
  for (std::size_t k : picks) {
    gold.push_back(corpus[k]);
    system.push_back(with_parse(corpus[k], parse_sentence(model, corpus[k])));
  }
  return evaluate(system, gold).las;
}

}  // namespace

TrainConfig TrainConfig::from(const Hyperparams& hp, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.epochs = hp.epochs;
  cfg.seed = seed;
  cfg.exploration.p_explore = hp.p_explore;
  cfg.exploration.margin = hp.explore_margin;
  return cfg;
}

std::vector<EpochMetrics> train(Model& model, const std::vector<Sentence>& corpus,
                                const TrainConfig& cfg) {
  if (corpus.empty()) throw DataError("training corpus is empty");
  if (cfg.epochs < 1) throw InvalidArgument("epochs must be at least 1");
  std::vector<GoldTree> gold;
  gold.reserve(corpus.size());
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    if (corpus[k].tokens.empty()) throw DataError("training sentence " + std::to_string(k + 1) + " is empty");
    gold.push_back(GoldTree::from_sentence(corpus[k]));
  }
  nn::AdamHyper hyper;
  hyper.learning_rate = model.hyperparams().learning_rate;
  nn::Adam adam(model.store(), hyper);
  nn::Gradients grads(model.store());
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<EpochMetrics> history;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochMetrics m;
    m.epoch = epoch;
    std::shuffle(order.begin(), order.end(), rng);
    const bool explore = epoch >= cfg.explore_from_epoch && cfg.exploration.p_explore > 0;
    for (std::size_t k : order) {
      SentenceLoss s = train_sentence(model, corpus[k], gold[k], cfg, explore, grads, rng);
      m.loss += s.value;
      m.transitions += s.transitions;
      m.explored += s.explored;
      if (s.value > 0) adam.step(model.store(), grads);
    }
    m.optimizer_steps = adam.steps();
    m.train_las = sample_las(model, corpus, cfg.las_sample, cfg.seed + static_cast<std::uint64_t>(epoch));
    if (cfg.dev) {
      std::vector<Sentence> parsed = parse_corpus(model, *cfg.dev);
      m.dev_las = evaluate(parsed, *cfg.dev).las;
    }
    m.optimizer_steps_after_dev = adam.steps();
    history.push_back(m);
    if (cfg.on_epoch) cfg.on_epoch(m, model);
  }
  return history;
}

ParseResult parse_sentence(const Model& model, const Sentence& sentence, const ParseOptions& opts) {
  const int n = sentence.size();
  nn::Graph g(model.store());
  auto contexts = model.encode_sentence(g, sentence);
  ParseResult out;
  Configuration c = initial_config(n);
  while (!c.is_final()) {
    ++out.transitions;
    const TransitionSet legal = legal_transitions(c);
    if (legal.size() == 1) {
      c = apply(c, Transition::shift());
      continue;
    }
    nn::Var h = model.feature_vector(g, contexts, c);
    const TransitionKind kind = best_scoring(to_scores(g.value(model.score_transitions(g, h))), legal);
    std::string label;
    if (is_arc(kind)) label = model.vocab().labels.symbol(argmax(g.value(model.score_labels(g, h))));
    c = apply(c, Transition{kind, std::move(label)});
  }
  out.heads.assign(static_cast<std::size_t>(n) + 1, -1);
  out.labels.assign(static_cast<std::size_t>(n) + 1, "");
  for (int d = 1; d <= n; ++d) {
    if (c.head(d) < 0) {
      out.heads[d] = 0;
      out.labels[d] = "root";
    } else {
      out.heads[d] = c.head(d);
      out.labels[d] = c.label(d);
    }
  }
  if (opts.single_root) {
    std::vector<std::string> upos;
    for (const Token& t : sentence.tokens) upos.push_back(t.upos);
    postprocess_single_root(std::span(out.heads).subspan(1), std::span(out.labels).subspan(1), upos,
                            opts.extra_root_label);
  }
  return out;
}

Sentence with_parse(const Sentence& sentence, const ParseResult& parse) {
  if (parse.heads.size() != sentence.tokens.size() + 1) {
    throw InvalidArgument("parse does not match the sentence length");
  }
  Sentence out = sentence;
  for (std::size_t k = 0; k < out.tokens.size(); ++k) {
    out.tokens[k].head = parse.heads[k + 1];
    out.tokens[k].deprel = parse.labels[k + 1];
  }
  return out;
}

std::vector<Sentence> parse_corpus(const Model& model, const std::vector<Sentence>& sentences,
                                   int jobs, const ParseOptions& opts) {
  std::vector<Sentence> out(sentences.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    for (std::size_t k = next++; k < sentences.size() && !failed; k = next++) {
      try {
        out[k] = with_parse(sentences[k], parse_sentence(model, sentences[k], opts));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), std::max<std::size_t>(sentences.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

void postprocess_single_root(std::span<int> heads, std::span<std::string> labels,
                             std::span<const std::string> upos, const std::string& extra_root_label) {
  const std::size_t n = heads.size();
  if (upos.size() != n || (!labels.empty() && labels.size() != n)) {
    throw InvalidArgument("heads, labels and tags must have one entry per word");
  }
  std::vector<std::size_t> roots;
  for (std::size_t k = 0; k < n; ++k) {
    if (heads[k] < 0 || static_cast<std::size_t>(heads[k]) > n) {
      throw InvalidArgument("head of word " + std::to_string(k + 1) + " is out of range");
    }
    if (heads[k] == 0) roots.push_back(k);
  }
  if (roots.empty()) throw InvalidArgument("no word is attached to the root");
  std::size_t chosen = roots.front();
  for (std::size_t r : roots) {
    if (upos[r] == "VERB") {
      chosen = r;
      break;
    }
  }
  for (std::size_t r : roots) {
    if (r == chosen) continue;
    heads[r] = static_cast<int>(chosen) + 1;
    if (!labels.empty()) labels[r] = extra_root_label;
  }
  if (!labels.empty()) labels[chosen] = "root";
}

std::vector<int> postprocess_single_root(std::vector<int> heads,
                                         const std::vector<std::string>& upos) {
  postprocess_single_root(heads, {}, upos);
  return heads;
}

}  // namespace covparse
