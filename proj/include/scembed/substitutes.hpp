#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scembed/common.hpp"
#include "scembed/ngram.hpp"

namespace scembed {

// The 2n-1 token window centered on one target position, target excluded.
struct ContextWindow {
  std::span<const WordId> sentence;
  std::int32_t position = 0;
  std::int32_t half_width = 0;  // model order - 1
};

struct SubstituteEntry {
  WordId word;
  double prob;
};

// Top-K replacement candidates for one token position, probabilities
// renormalized over the retained entries: strictly positive, non-increasing,
// summing to one.
struct SubstituteDistribution {
  std::int32_t position = 0;
  std::vector<SubstituteEntry> entries;
};

// Sum of the log-scores of every model term whose prediction or context
// involves the target position, with the candidate substituted there.
// Sentences are padded with begin markers and one end marker; terms past the
// end marker are dropped.
double context_score(const NgramModel& model, const ContextWindow& window, WordId candidate);

// Scores every candidate (the whole vocabulary except the boundary markers,
// the unknown word included), keeps the K best, renormalizes. Ties broken by
// ascending word id.
SubstituteDistribution substitute_distribution(const NgramModel& model, const ContextWindow& window,
                                               int k);

// Output-identical to substitute_distribution. Candidates are visited in
// decreasing order of an upper bound on their final score (the target-term
// score; every remaining term is a log-probability <= 0), so scoring stops
// once the bound falls below the worst kept entry.
SubstituteDistribution substitute_distribution_pruned(const NgramModel& model,
                                                      const ContextWindow& window, int k);

// One distribution per token in corpus order, written as
//   word<TAB>sub prob<TAB>sub prob...
// with a lone </s> line closing each sentence. Probabilities carry six
// significant digits. Sentences may be processed in parallel shards; output
// order and content are independent of the shard count.
void substitutes_for_corpus(const NgramModel& model, std::span<const std::vector<WordId>> corpus,
                            int k, std::ostream& out, int threads = 1);

struct SubstituteFileRow {
  bool sentence_end = false;
  std::string word;
  std::vector<std::pair<std::string, double>> subs;
};

class SubstituteFileReader {
 public:
  SubstituteFileReader(std::istream& in, std::string_view source_name)
      : in_(in), source_(source_name) {}

  // False at end of input.
  bool next(SubstituteFileRow& row);

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

}  // namespace scembed
