#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scembed/common.hpp"
#include "scembed/corpus.hpp"

namespace scembed {

inline constexpr int kMaxOrder = 8;

// Fixed-capacity n-gram key. Unused slots stay zero so the defaulted
// comparison is well defined.
struct Gram {
  std::array<WordId, kMaxOrder> ids{};
  std::int32_t len = 0;

  static Gram of(std::span<const WordId> words) {
    Gram g;
    g.len = static_cast<std::int32_t>(words.size());
    for (std::int32_t i = 0; i < g.len; ++i) g.ids[static_cast<std::size_t>(i)] = words[static_cast<std::size_t>(i)];
    return g;
  }

  Gram appended(WordId w) const {
    Gram g = *this;
    g.ids[static_cast<std::size_t>(g.len)] = w;
    ++g.len;
    return g;
  }

  // Drops the oldest word.
  Gram tail() const {
    Gram g;
    g.len = len - 1;
    for (std::int32_t i = 0; i < g.len; ++i) g.ids[static_cast<std::size_t>(i)] = ids[static_cast<std::size_t>(i + 1)];
    return g;
  }

  // Drops the newest word.
  Gram prefix() const {
    Gram g = *this;
    --g.len;
    g.ids[static_cast<std::size_t>(g.len)] = 0;
    return g;
  }

  WordId front() const { return ids[0]; }
  WordId back() const { return ids[static_cast<std::size_t>(len - 1)]; }
  std::span<const WordId> view() const { return {ids.data(), static_cast<std::size_t>(len)}; }

  bool operator==(const Gram&) const = default;
  bool operator<(const Gram& other) const {
    if (len != other.len) return len < other.len;
    for (std::int32_t i = 0; i < len; ++i) {
      const std::size_t k = static_cast<std::size_t>(i);
      if (ids[k] != other.ids[k]) return ids[k] < other.ids[k];
    }
    return false;
  }
};

struct GramHash {
  std::size_t operator()(const Gram& g) const {
    return static_cast<std::size_t>(fnv1a64(g.ids.data(), sizeof(WordId) * static_cast<std::size_t>(g.len)));
  }
};

// Raw (context, target) event counts per order. Each sentence is padded with
// order-1 begin markers and one end marker; every k-gram ending at a content
// token or the end marker is counted, so begin markers never appear as
// prediction targets.
class CountTable {
 public:
  using Map = std::unordered_map<Gram, std::int64_t, GramHash>;

  explicit CountTable(int order);

  int order() const { return order_; }
  std::int64_t total_events() const { return total_events_; }

  void add_sentence(std::span<const WordId> sentence, const Vocabulary& vocab);

  const Map& grams(int k) const { return maps_[static_cast<std::size_t>(k - 1)]; }
  Map& grams_mutable(int k) { return maps_[static_cast<std::size_t>(k - 1)]; }

 private:
  int order_;
  std::int64_t total_events_ = 0;
  std::vector<Map> maps_;
};

CountTable count_ngrams(std::span<const std::vector<WordId>> corpus, int order, const Vocabulary& vocab);

struct NgramEntry {
  double logp = 0.0;  // natural log conditional probability
  double bow = 0.0;   // natural log backoff weight
  bool has_prob = false;
  bool has_bow = false;
};

struct KnDiagnostics {
  std::vector<double> discounts;  // per order, index k-1
};

// Backoff n-gram language model. Probabilities are natural logs in memory;
// the ARPA boundary converts to and from base 10. The begin marker is never
// a valid prediction target; every other vocabulary word has a finite score
// under every history.
class NgramModel {
 public:
  using Map = std::unordered_map<Gram, NgramEntry, GramHash>;

  NgramModel(int order, Vocabulary vocab);

  int order() const { return order_; }
  const Vocabulary& vocab() const { return vocab_; }

  double logprob(WordId word, std::span<const WordId> history) const;

  void set_prob(std::span<const WordId> gram, double logp);
  void set_bow(std::span<const WordId> gram, double bow);

  const Map& entries(int k) const { return tables_[static_cast<std::size_t>(k - 1)]; }
  std::vector<Gram> sorted_grams(int k) const;
  const NgramEntry* find(std::span<const WordId> gram) const;

 private:
  int order_;
  Vocabulary vocab_;
  std::vector<Map> tables_;
};

// Interpolated Kneser-Ney with one discount per order, estimated as
// n1/(n1 + 2*n2) from the counts-of-counts of the counts actually smoothed
// at that order (raw at the top order, continuation counts below, except
// that grams starting with the begin marker keep raw counts). Falls back to
// 0.5 when n1 or n2 is zero. The lowest order interpolates with the uniform
// distribution over the predictable vocabulary.
NgramModel estimate_kn(const CountTable& counts, const Vocabulary& vocab,
                       KnDiagnostics* diagnostics = nullptr);

// 10^-(sum log10 P / T) over all predicted tokens including the end marker.
double perplexity(const NgramModel& model, std::span<const std::vector<WordId>> corpus);

void write_arpa(const NgramModel& model, std::ostream& out);
NgramModel read_arpa(std::istream& in, std::string_view source_name);

}  // namespace scembed
