#include "covparse/scorer.h"

#include <fstream>
#include <sstream>

#include "covparse/error.h"

namespace covparse {

Vocabulary::Vocabulary(std::vector<std::string> reserved, std::optional<std::size_t> unk)
    : reserved_(reserved.size()), unk_(unk) {
  for (std::string& s : reserved) {
    index_.emplace(s, symbols_.size());
    symbols_.push_back(std::move(s));
    counts_.push_back(0);
  }
}

Vocabulary Vocabulary::with_counts(std::vector<std::string> symbols, std::vector<long> counts,
                                   std::size_t reserved, std::optional<std::size_t> unk) {
  if (symbols.size() != counts.size() || reserved > symbols.size() ||
      (unk && *unk >= symbols.size())) {
    throw InvalidArgument("inconsistent vocabulary tables");
  }
  Vocabulary v;
  v.reserved_ = reserved;
  v.unk_ = unk;
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    if (!v.index_.emplace(symbols[k], k).second) {
      throw InvalidArgument("duplicate vocabulary symbol '" + symbols[k] + "'");
    }
  }
  v.symbols_ = std::move(symbols);
  v.counts_ = std::move(counts);
  return v;
}

std::size_t Vocabulary::add(const std::string& symbol) {
  auto [it, inserted] = index_.emplace(symbol, symbols_.size());
  if (inserted) {
    symbols_.push_back(symbol);
    counts_.push_back(0);
  }
  ++counts_[it->second];
  return it->second;
}

std::optional<std::size_t> Vocabulary::find(const std::string& symbol) const {
  auto it = index_.find(symbol);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::lookup(const std::string& symbol) const {
  if (auto k = find(symbol)) return *k;
  if (!unk_) throw InvalidArgument("unknown symbol '" + symbol + "' in a closed vocabulary");
  return *unk_;
}

std::size_t Vocabularies::word_index(const std::string& form) const {
  auto k = words.find(form);
  if (!k || *k < words.reserved() || words.count(*k) < min_count) return kUnkIndex;
  return *k;
}

std::size_t Vocabularies::tag_index(const Vocabulary& vocab, const std::string& value) const {
  if (value == "_") return kNoneIndex;
  auto k = vocab.find(value);
  if (!k || *k < vocab.reserved()) return kUnkIndex;
  return *k;
}

Vocabularies build_vocab(const std::vector<Sentence>& corpus, long min_count) {
  if (corpus.empty()) throw InvalidArgument("cannot build vocabularies from an empty corpus");
  if (min_count < 1) throw InvalidArgument("min_count must be at least 1");
  Vocabularies v;
  v.words = Vocabulary({"<pad>", "<unk>"}, kUnkIndex);
  v.upos = Vocabulary({"<none>", "<unk>"}, kUnkIndex);
  v.xpos = Vocabulary({"<none>", "<unk>"}, kUnkIndex);
  v.feats = Vocabulary({"<none>", "<unk>"}, kUnkIndex);
  v.labels = Vocabulary({}, std::nullopt);
  v.min_count = min_count;
  auto add_tag = [](Vocabulary& vocab, bool& present, const std::string& value) {
    if (value == "_") return;
    present = true;
    vocab.add(value);
  };
  for (const Sentence& s : corpus) {
    for (const Token& t : s.tokens) {
      v.words.add(t.form);
      add_tag(v.upos, v.has_upos, t.upos);
      add_tag(v.xpos, v.has_xpos, t.xpos);
      add_tag(v.feats, v.has_feats, t.feats);
      if (t.deprel) v.labels.add(*t.deprel);
    }
  }
  if (v.labels.size() == 0) throw DataError("training corpus has no dependency labels");
  return v;
}

std::string Hyperparams::validate() const {
  if (dim_word == 0 || dim_upos == 0 || dim_xpos == 0 || dim_feats == 0 || dim_external == 0) {
    return "embedding sizes must be positive";
  }
  if (bilstm_out < 2 || bilstm_out % 2 != 0) return "bilstm_out must be a positive even number";
  if (bilstm_layers == 0) return "bilstm_layers must be at least 1";
  if (mlp_hidden == 0) return "mlp_hidden must be positive";
  if (window_x == 0) return "window_x must be at least 1";
  if (epochs < 1) return "epochs must be at least 1";
  if (p_explore < 0 || p_explore > 1) return "p_explore must lie in [0, 1]";
  if (word_dropout_alpha < 0) return "word_dropout_alpha must be non-negative";
  if (min_count < 1) return "min_count must be at least 1";
  if (!(learning_rate > 0)) return "learning_rate must be positive";
  return "";
}

ExternalEmbeddings parse_external_embeddings(std::istream& in, std::size_t dim) {
  ExternalEmbeddings e;
  e.dim = dim;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    std::vector<double> row;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(line_no, "malformed embedding value '" + tok + "'");
      }
    }
    // "count dim" header
    if (line_no == 1 && row.size() == 1 && word.find_first_not_of("0123456789") == std::string::npos) {
      if (static_cast<std::size_t>(row[0]) != dim) {
        throw ParseError(line_no, "embedding dimension " + tok + " does not match expected " +
                                      std::to_string(dim));
      }
      continue;
    }
    if (row.size() != dim) {
      throw ParseError(line_no, "expected " + std::to_string(dim) + " values, found " +
                                    std::to_string(row.size()));
    }
    e.words.push_back(word);
    e.values.insert(e.values.end(), row.begin(), row.end());
  }
  return e;
}

ExternalEmbeddings load_external_embeddings(const std::string& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file '" + path + "'");
  try {
    return parse_external_embeddings(in, dim);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

Model Model::create(const Hyperparams& hp, Vocabularies vocab, std::uint64_t seed,
                    const ExternalEmbeddings* external) {
  if (std::string problem = hp.validate(); !problem.empty()) throw InvalidArgument(problem);
  if (external && external->dim != hp.dim_external) {
    throw InvalidArgument("external embeddings have dimension " + std::to_string(external->dim) +
                          ", expected " + std::to_string(hp.dim_external));
  }
  std::mt19937_64 rng(seed);
  Model m;
  m.hp_ = hp;
  m.vocab_ = std::move(vocab);
  nn::ParameterStore& s = m.store_;
  // Each row is initialized as if it were the image of a one-hot input.
  auto table = [&](const std::string& name, std::size_t rows, std::size_t dim) {
    nn::ParamId id = s.add(name, {rows, dim});
    nn::glorot_uniform(s.value(id), 1, dim, rng);
    return id;
  };
  std::size_t input = hp.dim_word;
  table("embed.word", m.vocab_.words.size(), hp.dim_word);
  if (m.vocab_.has_upos) {
    table("embed.upos", m.vocab_.upos.size(), hp.dim_upos);
    input += hp.dim_upos;
  }
  if (m.vocab_.has_xpos) {
    table("embed.xpos", m.vocab_.xpos.size(), hp.dim_xpos);
    input += hp.dim_xpos;
  }
  if (m.vocab_.has_feats) {
    table("embed.feats", m.vocab_.feats.size(), hp.dim_feats);
    input += hp.dim_feats;
  }
  if (external) {
    // Row 0 stays zero for words without a pretrained vector.
    nn::ParamId id = s.add("embed.external", {external->words.size() + 1, external->dim}, false);
    std::copy(external->values.begin(), external->values.end(),
              s.value(id).values.begin() + static_cast<long>(external->dim));
    m.external_words_ = external->words;
    input += hp.dim_external;
  }
  table("embed.root", 1, input);
  table("feature.pad", 1, hp.bilstm_out);
  nn::create_bilstm(s, "bilstm", input, hp.bilstm_out, hp.bilstm_layers, rng);
  nn::MlpParams::create(s, "mlp.transition", hp.slots() * hp.bilstm_out, hp.mlp_hidden, 4, rng);
  nn::MlpParams::create(s, "mlp.label", hp.slots() * hp.bilstm_out, hp.mlp_hidden,
                        m.vocab_.labels.size(), rng);
  m.bind();
  return m;
}

Model Model::assemble(const Hyperparams& hp, Vocabularies vocab,
                      std::vector<std::string> external_words, nn::ParameterStore store) {
  if (std::string problem = hp.validate(); !problem.empty()) throw InvalidArgument(problem);
  Model m;
  m.hp_ = hp;
  m.vocab_ = std::move(vocab);
  m.external_words_ = std::move(external_words);
  m.store_ = std::move(store);
  m.bind();
  return m;
}

void Model::bind() {
  const nn::ParameterStore& s = store_;
  auto expect = [&](nn::ParamId id, std::size_t rows, std::size_t cols) {
    const nn::Tensor& t = s.value(id);
    if (t.rows() != rows || t.cols() != cols) {
      throw InvalidArgument("parameter '" + s[id].name + "' has an unexpected shape");
    }
    return id;
  };
  word_table_ = expect(s.find("embed.word"), vocab_.words.size(), hp_.dim_word);
  input_dim_ = hp_.dim_word;
  auto channel = [&](bool present, const char* name, const Vocabulary& v, std::size_t dim)
      -> std::optional<nn::ParamId> {
    if (!present) return std::nullopt;
    input_dim_ += dim;
    return expect(s.find(name), v.size(), dim);
  };
  upos_table_ = channel(vocab_.has_upos, "embed.upos", vocab_.upos, hp_.dim_upos);
  xpos_table_ = channel(vocab_.has_xpos, "embed.xpos", vocab_.xpos, hp_.dim_xpos);
  feats_table_ = channel(vocab_.has_feats, "embed.feats", vocab_.feats, hp_.dim_feats);
  external_.reset();
  external_index_.clear();
  bool has_external = false;
  for (const nn::Parameter& p : s.params()) has_external |= p.name == "embed.external";
  if (has_external) {
    external_ = expect(s.find("embed.external"), external_words_.size() + 1, hp_.dim_external);
    for (std::size_t k = 0; k < external_words_.size(); ++k) {
      external_index_.emplace(external_words_[k], k + 1);
    }
    input_dim_ += hp_.dim_external;
  } else if (!external_words_.empty()) {
    throw InvalidArgument("external word list given without an external table");
  }
  root_input_ = expect(s.find("embed.root"), 1, input_dim_);
  pad_feature_ = expect(s.find("feature.pad"), 1, hp_.bilstm_out);
  bilstm_ = nn::bind_bilstm(s, "bilstm", hp_.bilstm_layers);
  if (bilstm_.front().forward.input_dim != input_dim_ ||
      bilstm_.front().forward.hidden_dim * 2 != hp_.bilstm_out) {
    throw InvalidArgument("BiLSTM parameters do not match the hyperparameters");
  }
  transition_mlp_ = nn::MlpParams::bind(s, "mlp.transition");
  label_mlp_ = nn::MlpParams::bind(s, "mlp.label");
  expect(transition_mlp_.hidden_weights, hp_.mlp_hidden, feature_dim());
  expect(transition_mlp_.output_weights, 4, hp_.mlp_hidden);
  expect(label_mlp_.hidden_weights, hp_.mlp_hidden, feature_dim());
  expect(label_mlp_.output_weights, vocab_.labels.size(), hp_.mlp_hidden);
}

nn::Var Model::word_input(nn::Graph& g, const Token& token, std::mt19937_64* dropout_rng) const {
  std::size_t word = vocab_.word_index(token.form);
  if (dropout_rng && word != kUnkIndex && hp_.word_dropout_alpha > 0) {
    const double alpha = hp_.word_dropout_alpha;
    std::bernoulli_distribution drop(alpha / (alpha + static_cast<double>(vocab_.words.count(word))));
    if (drop(*dropout_rng)) word = kUnkIndex;
  }
  std::vector<nn::Var> parts = {g.lookup(word_table_, word)};
  if (upos_table_) parts.push_back(g.lookup(*upos_table_, vocab_.tag_index(vocab_.upos, token.upos)));
  if (xpos_table_) parts.push_back(g.lookup(*xpos_table_, vocab_.tag_index(vocab_.xpos, token.xpos)));
  if (feats_table_) {
    parts.push_back(g.lookup(*feats_table_, vocab_.tag_index(vocab_.feats, token.feats)));
  }
  if (external_) {
    auto it = external_index_.find(token.form);
    parts.push_back(g.lookup(*external_, it == external_index_.end() ? 0 : it->second));
  }
  return parts.size() == 1 ? parts.front() : g.concat(parts);
}

std::vector<nn::Var> Model::encode_sentence(nn::Graph& g, const Sentence& sentence,
                                            std::mt19937_64* dropout_rng) const {
  if (sentence.tokens.empty()) throw InvalidArgument("cannot encode an empty sentence");
  std::vector<nn::Var> inputs = {g.lookup(root_input_, 0)};
  for (const Token& t : sentence.tokens) inputs.push_back(word_input(g, t, dropout_rng));
  return nn::bilstm_encode(g, bilstm_, inputs);
}

std::vector<int> feature_slots(const Configuration& c, const Hyperparams& hp) {
  std::vector<int> slots;
  slots.reserve(hp.slots());
  for (std::size_t k = 0; k < hp.window_x; ++k) {
    const int node = c.buffer_front() + static_cast<int>(k);
    slots.push_back(node <= c.n() ? node : -1);
  }
  auto last = [&](const std::vector<int>& list, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      const long pos = static_cast<long>(list.size()) - static_cast<long>(count) + static_cast<long>(k);
      slots.push_back(pos >= 0 ? list[static_cast<std::size_t>(pos)] : -1);
    }
  };
  last(c.lambda1(), hp.window_y);
  for (std::size_t k = 0; k < hp.window_z; ++k) {
    slots.push_back(k < c.lambda2().size() ? c.lambda2()[k] : -1);
  }
  last(c.lambda2(), hp.window_v);
  return slots;
}

nn::Var Model::feature_vector(nn::Graph& g, const std::vector<nn::Var>& contexts,
                              const Configuration& c) const {
  if (contexts.size() != static_cast<std::size_t>(c.n()) + 1) {
    throw InvalidArgument("context count does not match the configuration");
  }
  std::optional<nn::Var> pad;
  std::vector<nn::Var> parts;
  for (int node : feature_slots(c, hp_)) {
    if (node >= 0) {
      parts.push_back(contexts[static_cast<std::size_t>(node)]);
    } else {
      if (!pad) pad = g.lookup(pad_feature_, 0);
      parts.push_back(*pad);
    }
  }
  return g.concat(parts);
}

nn::Var Model::score_transitions(nn::Graph& g, nn::Var h) const {
  return nn::mlp_forward(g, transition_mlp_, h);
}

nn::Var Model::score_labels(nn::Graph& g, nn::Var h) const {
  return nn::mlp_forward(g, label_mlp_, h);
}

}  // namespace covparse
