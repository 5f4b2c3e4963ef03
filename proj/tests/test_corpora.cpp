#include "test_corpora.hpp"

#include <sstream>

#include "scembed/rng.hpp"

namespace scembed::testing {

std::vector<std::string> synthetic_lines(int num_sentences, int word_types, std::uint64_t seed) {
  RngStream rng = derive_stream(seed, "synthetic-corpus");
  std::vector<double> cumulative(static_cast<std::size_t>(word_types));
  double acc = 0.0;
  for (int i = 0; i < word_types; ++i) {
    acc += 1.0 / static_cast<double>(i + 1);  // zipf-like profile
    cumulative[static_cast<std::size_t>(i)] = acc;
  }
  auto draw_word = [&]() {
    const double u = rng.uniform() * acc;
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] > u) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return "w" + std::to_string(lo);
  };
  std::vector<std::string> lines;
  lines.reserve(static_cast<std::size_t>(num_sentences));
  for (int s = 0; s < num_sentences; ++s) {
    const int length = 3 + static_cast<int>(rng.bounded(8));
    std::string line;
    for (int t = 0; t < length; ++t) {
      if (t > 0) line += ' ';
      line += draw_word();
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

DeskCorpus make_desk_corpus(int num_sentences, int word_types, std::uint64_t seed,
                            std::int64_t min_count) {
  DeskCorpus corpus;
  corpus.lines = synthetic_lines(num_sentences, word_types, seed);
  std::ostringstream joined;
  for (const std::string& line : corpus.lines) joined << line << '\n';
  std::istringstream vocab_in(joined.str());
  corpus.vocab = build_vocabulary(vocab_in, min_count);
  corpus.ids.reserve(corpus.lines.size());
  for (const std::string& line : corpus.lines) {
    corpus.ids.push_back(apply_vocabulary(tokenize_line(line), corpus.vocab));
  }
  return corpus;
}

DeskModel make_desk_model(int num_sentences, int word_types, std::uint64_t seed, int order,
                          std::int64_t min_count) {
  DeskCorpus corpus = make_desk_corpus(num_sentences, word_types, seed, min_count);
  CountTable counts = count_ngrams(corpus.ids, order, corpus.vocab);
  NgramModel model = estimate_kn(counts, corpus.vocab);
  return {std::move(corpus), std::move(counts), std::move(model)};
}

}  // namespace scembed::testing
