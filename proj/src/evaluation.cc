#include "covparse/evaluation.h"

#include <cstdio>

#include "covparse/error.h"

namespace covparse {
namespace {

std::string universal(const std::string& deprel) { return deprel.substr(0, deprel.find(':')); }

std::string sentence_name(const Sentence& s, std::size_t index) {
  for (const std::string& c : s.comments) {
    const std::string key = "# sent_id = ";
    if (c.rfind(key, 0) == 0) return "'" + c.substr(key.size()) + "'";
  }
  return "#" + std::to_string(index + 1);
}

}  // namespace

Score Score::from_counts(long correct_heads, long correct_labeled, long total) {
  Score s;
  s.correct_heads = correct_heads;
  s.correct_labeled = correct_labeled;
  s.total = total;
  if (total > 0) {
    s.uas = 100.0 * static_cast<double>(correct_heads) / static_cast<double>(total);
    s.las = 100.0 * static_cast<double>(correct_labeled) / static_cast<double>(total);
  }
  return s;
}

Score evaluate(const std::vector<Sentence>& system, const std::vector<Sentence>& gold,
               const EvalOptions& opts) {
  if (system.size() != gold.size()) {
    throw DataError("system has " + std::to_string(system.size()) + " sentences, gold has " +
                    std::to_string(gold.size()));
  }
  long heads = 0, labeled = 0, total = 0;
  for (std::size_t k = 0; k < gold.size(); ++k) {
    const Sentence& sys = system[k];
    const Sentence& ref = gold[k];
    if (sys.tokens.size() != ref.tokens.size()) {
      throw DataError("sentence " + sentence_name(ref, k) + ": system has " +
                      std::to_string(sys.tokens.size()) + " words, gold has " +
                      std::to_string(ref.tokens.size()));
    }
    for (std::size_t w = 0; w < ref.tokens.size(); ++w) {
      const Token& r = ref.tokens[w];
      const Token& s = sys.tokens[w];
      if (!r.head || !r.deprel) {
        throw DataError("sentence " + sentence_name(ref, k) + ": gold word " +
                        std::to_string(r.id) + " has no head");
      }
      ++total;
      if (!s.head || *s.head != *r.head) continue;
      ++heads;
      if (!s.deprel) continue;
      const bool same = opts.exact_labels ? *s.deprel == *r.deprel
                                          : universal(*s.deprel) == universal(*r.deprel);
      if (same) ++labeled;
    }
  }
  return Score::from_counts(heads, labeled, total);
}

Score macro_average(const std::map<std::string, Score>& scores) {
  if (scores.empty()) throw InvalidArgument("macro average over no treebanks");
  Score out;
  for (const auto& [name, s] : scores) {
    out.las += s.las;
    out.uas += s.uas;
    out.correct_heads += s.correct_heads;
    out.correct_labeled += s.correct_labeled;
    out.total += s.total;
  }
  out.las /= static_cast<double>(scores.size());
  out.uas /= static_cast<double>(scores.size());
  return out;
}

std::string summary_line(const Score& score) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "LAS=%.2f UAS=%.2f N=%ld", score.las, score.uas, score.total);
  return buf;
}

}  // namespace covparse
