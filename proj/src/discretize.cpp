#include "scembed/discretize.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace scembed {

namespace {

std::int32_t draw_index(std::span<const double> cumulative, double u) {
  // First index whose cumulative mass exceeds u; the final index absorbs
  // floating-point shortfall.
  std::size_t lo = 0, hi = cumulative.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (cumulative[mid] > u) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return static_cast<std::int32_t>(lo);
}

}  // namespace

std::vector<std::int32_t> sample_categorical(std::span<const double> probs, int num_samples,
                                             RngStream& rng) {
  if (num_samples < 1) throw ValidationError("sample count must be >= 1");
  if (probs.empty()) throw ValidationError("cannot sample from an empty distribution");
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw ValidationError("negative probability in distribution");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw ValidationError("distribution is not normalized (sum " + format_general(total, 12) + ")");
  }
  std::vector<double> cumulative(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cumulative[i] = acc;
  }
  std::vector<std::int32_t> draws;
  draws.reserve(static_cast<std::size_t>(num_samples));
  for (int s = 0; s < num_samples; ++s) {
    draws.push_back(draw_index(cumulative, rng.uniform() * total));
  }
  return draws;
}

std::vector<WordId> sample_substitutes(const SubstituteDistribution& dist, int num_samples,
                                       RngStream& rng) {
  std::vector<double> probs;
  probs.reserve(dist.entries.size());
  for (const SubstituteEntry& entry : dist.entries) probs.push_back(entry.prob);
  const std::vector<std::int32_t> draws = sample_categorical(probs, num_samples, rng);
  std::vector<WordId> words;
  words.reserve(draws.size());
  for (std::int32_t index : draws) {
    words.push_back(dist.entries[static_cast<std::size_t>(index)].word);
  }
  return words;
}

std::vector<CooccurrencePair> emit_pairs(std::span<const WordId> tokens,
                                         std::span<const SubstituteDistribution> dists,
                                         int num_samples, std::uint64_t seed,
                                         std::uint64_t first_token_index) {
  if (tokens.size() != dists.size()) {
    throw ValidationError("token stream has " + std::to_string(tokens.size()) +
                          " entries but distribution stream has " + std::to_string(dists.size()));
  }
  std::vector<CooccurrencePair> pairs;
  pairs.reserve(tokens.size() * static_cast<std::size_t>(num_samples));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    RngStream rng = token_sample_stream(seed, first_token_index + i);
    for (WordId y : sample_substitutes(dists[i], num_samples, rng)) {
      pairs.push_back({tokens[i], y});
    }
  }
  return pairs;
}

SamplePairsStats sample_pairs_file(std::istream& subs_in, std::string_view subs_name,
                                   std::ostream& pairs_out, int num_samples, std::uint64_t seed) {
  if (num_samples < 1) throw ValidationError("sample.S must be >= 1");
  SubstituteFileReader reader(subs_in, subs_name);
  SubstituteFileRow row;
  SamplePairsStats stats;
  std::vector<double> probs;
  std::uint64_t token_index = 0;
  while (reader.next(row)) {
    if (row.sentence_end) continue;
    probs.clear();
    double total = 0.0;
    for (const auto& [word, prob] : row.subs) total += prob;
    if (total <= 0.0 || std::abs(total - 1.0) > 1e-3) {
      throw ParseError(std::string(subs_name), 0,
                       "substitute row for \"" + row.word + "\" is not normalized");
    }
    for (const auto& [word, prob] : row.subs) probs.push_back(prob / total);
    RngStream rng = token_sample_stream(seed, token_index);
    for (std::int32_t index : sample_categorical(probs, num_samples, rng)) {
      pairs_out << row.word << '\t' << row.subs[static_cast<std::size_t>(index)].first << '\n';
      ++stats.pairs;
    }
    if (!pairs_out) throw IoError("write failed at token " + std::to_string(token_index));
    ++token_index;
    ++stats.tokens;
  }
  stats.tokens = static_cast<std::int64_t>(token_index);
  return stats;
}

}  // namespace scembed
