#include "covparse/cli.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "covparse/error.h"
#include "covparse/evaluation.h"
#include "covparse/model_file.h"
#include "covparse/parser.h"

namespace covparse {
namespace {

enum class LogLevel { kError, kInfo, kDebug };

LogLevel log_level_from_env() {
  const char* v = std::getenv("COVPARSE_LOG");
  if (!v) return LogLevel::kInfo;
  const std::string s = v;
  if (s == "error") return LogLevel::kError;
  if (s == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

class Logger {
 public:
  Logger(std::ostream& err, LogLevel level) : err_(err), level_(level) {}
  void info(const std::string& msg) const { emit(LogLevel::kInfo, "info", msg); }
  void debug(const std::string& msg) const { emit(LogLevel::kDebug, "debug", msg); }
  void error(const std::string& msg) const { emit(LogLevel::kError, "error", msg); }

 private:
  void emit(LogLevel at, const char* tag, const std::string& msg) const {
    if (at <= level_) err_ << "covparse: " << tag << ": " << msg << '\n';
  }
  std::ostream& err_;
  LogLevel level_;
};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read configuration '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TrainArgs {
  std::string train, dev, external, out, config;
  int epochs = 0;
  std::size_t bilstm_out = 0;
  std::uint64_t seed = 1;
  int checkpoint_every = 0;
};

int cmd_train(const CLI::App& app, const TrainArgs& a, std::ostream& out, const Logger& log) {
  Hyperparams hp;
  if (!a.config.empty()) hp = hyperparams_from_json(slurp_file(a.config), hp);
  if (app.count("--epochs")) hp.epochs = a.epochs;
  if (app.count("--bilstm-out")) hp.bilstm_out = a.bilstm_out;
  if (std::string problem = hp.validate(); !problem.empty()) throw InvalidArgument(problem);
  log.debug("hyperparameters " + hyperparams_to_json(hp));

  const auto corpus = read_conllu_file(a.train);
  log.info("read " + std::to_string(corpus.size()) + " training sentences from " + a.train);
  std::optional<std::vector<Sentence>> dev;
  if (!a.dev.empty()) {
    dev = read_conllu_file(a.dev);
    log.info("read " + std::to_string(dev->size()) + " dev sentences from " + a.dev);
  }
  std::optional<ExternalEmbeddings> external;
  if (!a.external.empty()) {
    external = load_external_embeddings(a.external, hp.dim_external);
    log.info("loaded " + std::to_string(external->words.size()) + " external vectors");
  }
  Model model = Model::create(hp, build_vocab(corpus, hp.min_count), a.seed,
                              external ? &*external : nullptr);
  TrainConfig cfg = TrainConfig::from(hp, a.seed);
  if (dev) cfg.dev = &*dev;
  cfg.on_epoch = [&](const EpochMetrics& m, const Model& current) {
    out << "epoch " << m.epoch << " loss=" << fmt2(m.loss) << " train_las=" << fmt2(m.train_las);
    if (m.dev_las) out << " dev_las=" << fmt2(*m.dev_las);
    out << " explored=" << m.explored << '\n' << std::flush;
    if (a.checkpoint_every > 0 && m.epoch % a.checkpoint_every == 0) {
      save_model_file(current, a.out);
      log.info("checkpoint written to " + a.out);
    }
  };
  train(model, corpus, cfg);
  save_model_file(model, a.out);
  log.info("model written to " + a.out);
  return kExitOk;
}

struct ParseArgs {
  std::string model, input, output;
  int jobs = 1;
};

int cmd_parse(const ParseArgs& a, const Logger& log) {
  const Model model = load_model_file(a.model);
  ReadOptions lenient;
  lenient.strict = false;
  const auto input = read_conllu_file(a.input, lenient);
  log.info("parsing " + std::to_string(input.size()) + " sentences with " + std::to_string(a.jobs) +
           " worker(s)");
  write_conllu_file(parse_corpus(model, input, a.jobs), a.output);
  return kExitOk;
}

struct EvalArgs {
  std::vector<std::string> system, gold;
  bool exact = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.system.size() != a.gold.size()) {
    throw InvalidArgument("--system and --gold must be given the same number of times");
  }
  EvalOptions opts;
  opts.exact_labels = a.exact;
  ReadOptions lenient;
  lenient.strict = false;
  std::map<std::string, Score> scores;
  for (std::size_t k = 0; k < a.system.size(); ++k) {
    Score s = evaluate(read_conllu_file(a.system[k], lenient), read_conllu_file(a.gold[k], lenient), opts);
    if (a.system.size() > 1) {
      out << a.system[k] << ' ' << summary_line(s) << '\n';
      char key[16];
      std::snprintf(key, sizeof key, "%08zu", k);
      scores.emplace(key, s);
    } else {
      out << summary_line(s) << '\n';
    }
  }
  if (scores.size() > 1) out << "macro-average " << summary_line(macro_average(scores)) << '\n';
  return kExitOk;
}

struct MergeArgs {
  std::vector<std::string> sources, models;
  std::string out, sample;
  std::size_t take = 2000;
  bool rank = false;
  int jobs = 1;
};

int cmd_merge(const MergeArgs& a, std::ostream& out, const Logger& log) {
  if (a.rank) {
    if (a.models.size() != a.sources.size() || a.sample.empty()) {
      throw InvalidArgument("--rank needs one --model per --source and a --sample file");
    }
    const auto sample = read_conllu_file(a.sample);
    std::vector<std::function<double()>> scorers;
    for (const std::string& path : a.models) {
      scorers.push_back([&, path] {
        const Model m = load_model_file(path);
        return evaluate(parse_corpus(m, sample, a.jobs), sample).las;
      });
    }
    for (const RankedSource& r : rank_sources(a.sources, scorers)) {
      out << r.name << '\t' << fmt2(r.las) << '\n';
    }
    return kExitOk;
  }
  if (a.out.empty()) throw InvalidArgument("merge-treebanks needs --out unless --rank is given");
  std::vector<std::vector<Sentence>> sources;
  for (const std::string& path : a.sources) sources.push_back(read_conllu_file(path));
  const auto merged = merge_treebanks(sources, a.take);
  write_conllu_file(merged, a.out);
  log.info("wrote " + std::to_string(merged.size()) + " sentences to " + a.out);
  return kExitOk;
}

}  // namespace

std::vector<Sentence> merge_treebanks(const std::vector<std::vector<Sentence>>& sources,
                                      std::size_t take) {
  std::vector<Sentence> out;
  for (const auto& source : sources) {
    const std::size_t n = std::min(take, source.size());
    out.insert(out.end(), source.begin(), source.begin() + static_cast<long>(n));
  }
  return out;
}

std::vector<RankedSource> rank_sources(const std::vector<std::string>& names,
                                       const std::vector<std::function<double()>>& scorers) {
  if (names.size() != scorers.size()) throw InvalidArgument("one scorer per source is required");
  std::vector<RankedSource> ranked;
  for (std::size_t k = 0; k < names.size(); ++k) ranked.push_back({names[k], scorers[k]()});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedSource& a, const RankedSource& b) { return a.las > b.las; });
  return ranked;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Logger log(err, log_level_from_env());
  CLI::App app{"Greedy non-projective dependency parser", "covparse"};
  app.require_subcommand(1);

  TrainArgs ta;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model and write it to --out");
  train_cmd->add_option("--train", ta.train, "Training treebank (CoNLL-U)")->required();
  train_cmd->add_option("--dev", ta.dev, "Development treebank, scored after each epoch only");
  train_cmd->add_option("--external-embeddings", ta.external, "Pretrained word vectors (text)");
  train_cmd->add_option("--epochs", ta.epochs, "Training epochs")->check(CLI::PositiveNumber);
  train_cmd->add_option("--bilstm-out", ta.bilstm_out, "BiLSTM output size")
      ->check(CLI::IsMember({256, 512}));
  train_cmd->add_option("--seed", ta.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--config", ta.config, "JSON file with hyperparameters");
  train_cmd->add_option("--checkpoint-every", ta.checkpoint_every,
                        "Also write the model after every N epochs");
  train_cmd->add_option("--out", ta.out, "Model file to write")->required();

  ParseArgs pa;
  CLI::App* parse_cmd = app.add_subcommand("parse", "Fill HEAD and DEPREL of a CoNLL-U file");
  parse_cmd->add_option("--model", pa.model, "Model file")->required();
  parse_cmd->add_option("--input", pa.input, "Input CoNLL-U")->required();
  parse_cmd->add_option("--output", pa.output, "Output CoNLL-U")->required();
  parse_cmd->add_option("--jobs", pa.jobs, "Parallel sentence workers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  EvalArgs ea;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score system output against gold trees");
  eval_cmd->add_option("--system", ea.system, "System CoNLL-U (repeatable)")->required();
  eval_cmd->add_option("--gold", ea.gold, "Gold CoNLL-U (repeatable, paired in order)")->required();
  eval_cmd->add_flag("--exact", ea.exact, "Compare full deprels including subtypes");

  MergeArgs ma;
  CLI::App* merge_cmd = app.add_subcommand("merge-treebanks", "Concatenate treebank prefixes");
  merge_cmd->add_option("--source", ma.sources, "Source CoNLL-U (repeatable)")->required();
  merge_cmd->add_option("--take", ma.take, "Sentences taken from each source")->capture_default_str();
  merge_cmd->add_option("--out", ma.out, "Merged CoNLL-U");
  merge_cmd->add_flag("--rank", ma.rank, "Rank sources by the LAS of their models on --sample");
  merge_cmd->add_option("--model", ma.models, "Model per source for --rank (repeatable)");
  merge_cmd->add_option("--sample", ma.sample, "Sample CoNLL-U for --rank");
  merge_cmd->add_option("--jobs", ma.jobs, "Parallel sentence workers for --rank")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "covparse: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(*train_cmd, ta, out, log);
    if (parse_cmd->parsed()) return cmd_parse(pa, log);
    if (eval_cmd->parsed()) return cmd_eval(ea, out);
    if (merge_cmd->parsed()) return cmd_merge(ma, out, log);
  } catch (const ModelError& e) {
    log.error(e.what());
    return kExitModel;
  } catch (const DataError& e) {
    log.error(e.what());
    return kExitData;
  } catch (const InvalidArgument& e) {
    log.error(e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    log.error(e.what());
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace covparse
