#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "scembed/common.hpp"
#include "scembed/rng.hpp"
#include "scembed/substitutes.hpp"

namespace scembed {

// One (word type, sampled substitute) draw. The x and y vocabularies may
// differ: x ranges over the embedded corpus word types, y over the language
// model vocabulary.
struct CooccurrencePair {
  WordId x;
  WordId y;
};

// S independent index draws with replacement from a categorical
// distribution. Probabilities must sum to one within 1e-6.
std::vector<std::int32_t> sample_categorical(std::span<const double> probs, int num_samples,
                                             RngStream& rng);

std::vector<WordId> sample_substitutes(const SubstituteDistribution& dist, int num_samples,
                                       RngStream& rng);

// Per-token RNG substream: parallel shards reproduce the sequential pair
// multiset token by token.
inline RngStream token_sample_stream(std::uint64_t seed, std::uint64_t token_index) {
  return derive_stream(seed, "sample", token_index);
}

// S pairs (word, substitute) per token, samples contiguous, corpus order.
// Token and distribution streams must align one to one.
std::vector<CooccurrencePair> emit_pairs(std::span<const WordId> tokens,
                                         std::span<const SubstituteDistribution> dists,
                                         int num_samples, std::uint64_t seed,
                                         std::uint64_t first_token_index = 0);

struct SamplePairsStats {
  std::int64_t tokens = 0;
  std::int64_t pairs = 0;
};

// Streams a substitute file into a pairs file (x_word<TAB>y_word per line).
// File probabilities are renormalized before sampling to absorb the six
// significant digits of the text format.
SamplePairsStats sample_pairs_file(std::istream& subs_in, std::string_view subs_name,
                                   std::ostream& pairs_out, int num_samples, std::uint64_t seed);

}  // namespace scembed
