#ifndef COVPARSE_EVALUATION_H_
#define COVPARSE_EVALUATION_H_

#include <map>
#include <string>
#include <vector>

#include "covparse/treebank.h"

namespace covparse {

struct Score {
  double las = 0.0;  // percent
  double uas = 0.0;  // percent
  long correct_heads = 0;
  long correct_labeled = 0;
  long total = 0;

  static Score from_counts(long correct_heads, long correct_labeled, long total);
};

struct EvalOptions {
  // Compare whole deprels instead of the part before ':'.
  bool exact_labels = false;
};

// Word-level attachment scores under identical segmentation. Throws
// DataError when the sentence or word counts differ.
Score evaluate(const std::vector<Sentence>& system, const std::vector<Sentence>& gold,
               const EvalOptions& opts = {});

// Unweighted mean of the LAS and UAS values; counts are summed.
Score macro_average(const std::map<std::string, Score>& scores);

// "LAS=<f> UAS=<f> N=<int>"
std::string summary_line(const Score& score);

}  // namespace covparse

#endif  // COVPARSE_EVALUATION_H_
