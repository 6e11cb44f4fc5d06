#include "covparse/model_file.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "covparse/error.h"
#include "json.hpp"

namespace covparse {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'C', 'O', 'V', 'P', 'A', 'R', 'S', 'E'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  char bytes[sizeof(T)];
  for (std::size_t k = 0; k < sizeof(T); ++k) bytes[k] = static_cast<char>((value >> (8 * k)) & 0xff);
  out.write(bytes, sizeof(T));
}

template <typename T>
T get(std::istream& in, const char* what) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw ModelError(std::string("model file is truncated while reading ") + what);
  }
  T value = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) value |= static_cast<T>(static_cast<T>(bytes[k]) << (8 * k));
  return value;
}

std::string get_bytes(std::istream& in, std::uint64_t n, const char* what) {
  // Refuse absurd lengths before allocating.
  if (n > (std::uint64_t{1} << 32)) throw ModelError(std::string("implausible length for ") + what);
  std::string s(n, '\0');
  if (!in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw ModelError(std::string("model file is truncated while reading ") + what);
  }
  return s;
}

#define COVPARSE_HYPERPARAMS(X)                                                         \
  X(dim_word) X(dim_upos) X(dim_xpos) X(dim_feats) X(dim_external) X(bilstm_out)        \
  X(bilstm_layers) X(mlp_hidden) X(window_x) X(window_y) X(window_z) X(window_v) X(epochs) \
  X(p_explore) X(explore_margin) X(word_dropout_alpha) X(min_count) X(learning_rate)

json hp_json(const Hyperparams& hp) {
  json j = json::object();
#define X(f) j[#f] = hp.f;
  COVPARSE_HYPERPARAMS(X)
#undef X
  return j;
}

template <typename T>
void read_field(const std::string& key, const json& value, T& field) {
  if constexpr (std::is_unsigned_v<T>) {
    if (!value.is_number_unsigned()) {
      throw InvalidArgument("hyperparameter '" + key + "' must be a non-negative integer");
    }
  } else if constexpr (std::is_integral_v<T>) {
    if (!value.is_number_integer()) throw InvalidArgument("hyperparameter '" + key + "' must be an integer");
  } else {
    if (!value.is_number()) throw InvalidArgument("hyperparameter '" + key + "' must be a number");
  }
  field = value.get<T>();
}

Hyperparams hp_from(const json& j, Hyperparams hp) {
  if (!j.is_object()) throw InvalidArgument("hyperparameters must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
#define X(f)                           \
  if (key == #f) {                     \
    read_field(key, value, hp.f);      \
    known = true;                      \
  }
    COVPARSE_HYPERPARAMS(X)
#undef X
    if (!known) throw InvalidArgument("unknown hyperparameter '" + key + "'");
  }
  return hp;
}

json vocab_json(const Vocabulary& v) {
  json j;
  j["symbols"] = v.symbols();
  j["counts"] = v.counts();
  j["reserved"] = v.reserved();
  j["unk"] = v.unk() ? json(*v.unk()) : json(nullptr);
  return j;
}

Vocabulary vocab_from(const json& j) {
  std::optional<std::size_t> unk;
  if (!j.at("unk").is_null()) unk = j.at("unk").get<std::size_t>();
  return Vocabulary::with_counts(j.at("symbols").get<std::vector<std::string>>(),
                                 j.at("counts").get<std::vector<long>>(),
                                 j.at("reserved").get<std::size_t>(), unk);
}

json metadata(const Model& m) {
  const Vocabularies& v = m.vocab();
  json j;
  j["hyperparams"] = hp_json(m.hyperparams());
  j["vocab"] = {{"words", vocab_json(v.words)},   {"upos", vocab_json(v.upos)},
                {"xpos", vocab_json(v.xpos)},     {"feats", vocab_json(v.feats)},
                {"labels", vocab_json(v.labels)}, {"min_count", v.min_count}};
  j["channels"] = {{"upos", v.has_upos}, {"xpos", v.has_xpos}, {"feats", v.has_feats},
                   {"external", m.has_external()}};
  j["external_words"] = m.external_words();
  return j;
}

}  // namespace

std::string hyperparams_to_json(const Hyperparams& hp) { return hp_json(hp).dump(2); }

Hyperparams hyperparams_from_json(std::string_view text, Hyperparams base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed configuration: ") + e.what());
  }
  return hp_from(j, base);
}

void save_model(const Model& model, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kModelFormatVersion);
  const std::string meta = metadata(model).dump();
  put<std::uint64_t>(out, meta.size());
  out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  const auto& params = model.store().params();
  put<std::uint64_t>(out, params.size());
  for (const nn::Parameter& p : params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.shape.size()));
    for (std::size_t d : p.value.shape) put<std::uint64_t>(out, d);
    put<std::uint8_t>(out, p.trainable ? 1 : 0);
    for (double v : p.value.values) put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  if (!out) throw ModelError("failed to write the model");
}

void save_model_file(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelError("cannot open '" + path + "' for writing");
  save_model(model, out);
  out.flush();
  if (!out) throw ModelError("failed to write '" + path + "'");
}

Model load_model(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ModelError("not a covparse model file");
  }
  const auto version = get<std::uint32_t>(in, "the format version");
  if (version != kModelFormatVersion) {
    throw ModelError("model format version " + std::to_string(version) +
                     " is not supported (this build reads version " +
                     std::to_string(kModelFormatVersion) + ")");
  }
  const std::string meta_text = get_bytes(in, get<std::uint64_t>(in, "the metadata length"), "metadata");
  nn::ParameterStore store;
  const auto count = get<std::uint64_t>(in, "the tensor count");
  for (std::uint64_t t = 0; t < count; ++t) {
    std::string name = get_bytes(in, get<std::uint32_t>(in, "a tensor name"), "a tensor name");
    const auto rank = get<std::uint32_t>(in, "a tensor rank");
    if (rank > 8) throw ModelError("tensor '" + name + "' has an implausible rank");
    std::vector<std::size_t> shape;
    for (std::uint32_t r = 0; r < rank; ++r) shape.push_back(get<std::uint64_t>(in, "a tensor shape"));
    const bool trainable = get<std::uint8_t>(in, "a tensor flag") != 0;
    if (nn::element_count(shape) > (std::size_t{1} << 32)) {
      throw ModelError("tensor '" + name + "' is implausibly large");
    }
    nn::ParamId id;
    try {
      id = store.add(name, shape, trainable);
    } catch (const Error& e) {
      throw ModelError(e.what());
    }
    for (double& v : store.value(id).values) {
      v = static_cast<double>(std::bit_cast<float>(get<std::uint32_t>(in, "tensor values")));
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ModelError("trailing bytes after the model");
  try {
    const json meta = json::parse(meta_text);
    Vocabularies v;
    const json& jv = meta.at("vocab");
    v.words = vocab_from(jv.at("words"));
    v.upos = vocab_from(jv.at("upos"));
    v.xpos = vocab_from(jv.at("xpos"));
    v.feats = vocab_from(jv.at("feats"));
    v.labels = vocab_from(jv.at("labels"));
    v.min_count = jv.at("min_count").get<long>();
    const json& ch = meta.at("channels");
    v.has_upos = ch.at("upos").get<bool>();
    v.has_xpos = ch.at("xpos").get<bool>();
    v.has_feats = ch.at("feats").get<bool>();
    Model m = Model::assemble(hp_from(meta.at("hyperparams"), Hyperparams{}), std::move(v),
                              meta.at("external_words").get<std::vector<std::string>>(),
                              std::move(store));
    if (m.has_external() != ch.at("external").get<bool>()) {
      throw ModelError("external channel flag does not match the stored tensors");
    }
    return m;
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model metadata: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ModelError(std::string("inconsistent model: ") + e.what());
  }
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model '" + path + "'");
  try {
    return load_model(in);
  } catch (const ModelError& e) {
    throw ModelError(path + ": " + e.what());
  }
}

}  // namespace covparse
