#pragma once

#include <map>
#include <utility>
#include <vector>

#include "scembed/ngram.hpp"

namespace scembed::testing {

// Independent interpolated Kneser-Ney reference. Evaluates the textbook
// recursion directly from ordered count maps on every query instead of
// building backoff tables; shares nothing with estimate_kn beyond the raw
// counts it is given.
class KnReference {
 public:
  KnReference(const CountTable& counts, const Vocabulary& vocab);

  // P(word | history), history truncated to the most recent order-1 words.
  double prob(WordId word, std::vector<WordId> history) const;

  double discount(int k) const { return discount_[static_cast<std::size_t>(k - 1)]; }

 private:
  using Key = std::vector<WordId>;

  int order_;
  WordId bos_;
  double uniform_;
  std::vector<std::map<Key, long long>> used_;  // index k-1
  std::vector<std::map<Key, std::pair<long long, long long>>> contexts_;  // total, types
  std::vector<double> discount_;

  double conditional(int k, const Key& history, WordId word) const;
};

}  // namespace scembed::testing
