#include "scembed/substitutes.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <sstream>

namespace scembed {

namespace {

// Candidate ranking: higher score first, then lower id.
bool better(const std::pair<double, WordId>& a, const std::pair<double, WordId>& b) {
  if (a.first != b.first) return a.first > b.first;
  return a.second < b.second;
}

struct ScoringContext {
  std::vector<WordId> padded;
  std::size_t target;
  int order;

  ScoringContext(const NgramModel& model, const ContextWindow& window) {
    order = model.order();
    if (window.half_width != order - 1) {
      throw ValidationError("window half_width must equal model order - 1");
    }
    if (window.position < 0 ||
        static_cast<std::size_t>(window.position) >= window.sentence.size()) {
      throw ValidationError("window position out of range");
    }
    const Vocabulary& vocab = model.vocab();
    padded.reserve(window.sentence.size() + static_cast<std::size_t>(order));
    padded.assign(static_cast<std::size_t>(order - 1), vocab.bos_id());
    padded.insert(padded.end(), window.sentence.begin(), window.sentence.end());
    padded.push_back(vocab.eos_id());
    target = static_cast<std::size_t>(window.position + order - 1);
  }

  double score(const NgramModel& model, WordId candidate) {
    padded[target] = candidate;
    double total = 0.0;
    const std::size_t hist = static_cast<std::size_t>(order - 1);
    for (int j = 0; j < order; ++j) {
      const std::size_t q = target + static_cast<std::size_t>(j);
      if (q >= padded.size()) break;
      total += model.logprob(padded[q], {padded.data() + q - hist, hist});
    }
    return total;
  }

  // The target term alone: an upper bound on the full score.
  double target_term(const NgramModel& model, WordId candidate) const {
    const std::size_t hist = static_cast<std::size_t>(order - 1);
    return model.logprob(candidate, {padded.data() + target - hist, hist});
  }
};

std::vector<WordId> candidate_words(const Vocabulary& vocab) {
  std::vector<WordId> words;
  words.reserve(static_cast<std::size_t>(vocab.size()));
  for (WordId w = 0; w < vocab.size(); ++w) {
    if (!vocab.is_marker(w)) words.push_back(w);
  }
  return words;
}

SubstituteDistribution finalize(std::vector<std::pair<double, WordId>> picked,
                                std::int32_t position) {
  std::sort(picked.begin(), picked.end(), better);
  SubstituteDistribution dist;
  dist.position = position;
  dist.entries.reserve(picked.size());
  const double shift = picked.front().first;
  double denom = 0.0;
  for (const auto& [score, word] : picked) denom += std::exp(score - shift);
  for (const auto& [score, word] : picked) {
    dist.entries.push_back({word, std::exp(score - shift) / denom});
  }
  return dist;
}

}  // namespace

double context_score(const NgramModel& model, const ContextWindow& window, WordId candidate) {
  ScoringContext ctx(model, window);
  if (candidate < 0 || candidate >= model.vocab().size() || model.vocab().is_marker(candidate)) {
    throw ValidationError("candidate id " + std::to_string(candidate) + " is not a scoreable word");
  }
  return ctx.score(model, candidate);
}

SubstituteDistribution substitute_distribution(const NgramModel& model, const ContextWindow& window,
                                               int k) {
  if (k < 1) throw ValidationError("substitute count K must be >= 1");
  ScoringContext ctx(model, window);
  std::vector<std::pair<double, WordId>> scored;
  const std::vector<WordId> candidates = candidate_words(model.vocab());
  scored.reserve(candidates.size());
  for (WordId w : candidates) {
    scored.emplace_back(ctx.score(model, w), w);
  }
  std::sort(scored.begin(), scored.end(), better);
  if (scored.size() > static_cast<std::size_t>(k)) scored.resize(static_cast<std::size_t>(k));
  return finalize(std::move(scored), window.position);
}

SubstituteDistribution substitute_distribution_pruned(const NgramModel& model,
                                                      const ContextWindow& window, int k) {
  if (k < 1) throw ValidationError("substitute count K must be >= 1");
  ScoringContext ctx(model, window);
  const std::vector<WordId> candidates = candidate_words(model.vocab());

  std::vector<std::pair<double, WordId>> bounds;
  bounds.reserve(candidates.size());
  for (WordId w : candidates) {
    bounds.emplace_back(ctx.target_term(model, w), w);
  }
  std::sort(bounds.begin(), bounds.end(), better);

  // Min-heap of the K best fully scored candidates; heap top is the worst.
  auto worse = [](const std::pair<double, WordId>& a, const std::pair<double, WordId>& b) {
    return better(a, b);
  };
  std::vector<std::pair<double, WordId>> heap;
  heap.reserve(static_cast<std::size_t>(k) + 1);
  for (const auto& [bound, word] : bounds) {
    if (heap.size() == static_cast<std::size_t>(k) && bound < heap.front().first) break;
    const double full = ctx.score(model, word);
    if (heap.size() < static_cast<std::size_t>(k)) {
      heap.emplace_back(full, word);
      std::push_heap(heap.begin(), heap.end(), worse);
    } else if (better({full, word}, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), worse);
      heap.back() = {full, word};
      std::push_heap(heap.begin(), heap.end(), worse);
    }
  }
  return finalize(std::move(heap), window.position);
}

namespace {

void append_sentence_rows(const NgramModel& model, std::span<const WordId> sentence, int k,
                          std::string& out) {
  const Vocabulary& vocab = model.vocab();
  const int half = model.order() - 1;
  for (std::int32_t pos = 0; pos < static_cast<std::int32_t>(sentence.size()); ++pos) {
    ContextWindow window{sentence, pos, half};
    const SubstituteDistribution dist = substitute_distribution_pruned(model, window, k);
    out += vocab.word(sentence[static_cast<std::size_t>(pos)]);
    for (const SubstituteEntry& entry : dist.entries) {
      out += '\t';
      out += vocab.word(entry.word);
      out += ' ';
      out += format_general(entry.prob, 6);
    }
    out += '\n';
  }
  out += Vocabulary::kEos;
  out += '\n';
}

}  // namespace

void substitutes_for_corpus(const NgramModel& model, std::span<const std::vector<WordId>> corpus,
                            int k, std::ostream& out, int threads) {
  if (threads < 1) throw ValidationError("threads must be >= 1");
  const std::size_t shards = std::min<std::size_t>(static_cast<std::size_t>(threads), corpus.size());
  if (shards <= 1) {
    std::size_t index = 0;
    for (const auto& sentence : corpus) {
      std::string block;
      append_sentence_rows(model, sentence, k, block);
      out << block;
      if (!out) throw IoError("write failed at sentence " + std::to_string(index));
      ++index;
    }
    return;
  }

  std::vector<std::future<std::string>> futures;
  futures.reserve(shards);
  const std::size_t per_shard = (corpus.size() + shards - 1) / shards;
  for (std::size_t s = 0; s < shards; ++s) {
    const std::size_t begin = s * per_shard;
    const std::size_t end = std::min(corpus.size(), begin + per_shard);
    futures.push_back(std::async(std::launch::async, [&, begin, end]() {
      std::string block;
      for (std::size_t i = begin; i < end; ++i) {
        append_sentence_rows(model, corpus[i], k, block);
      }
      return block;
    }));
  }
  std::size_t shard_index = 0;
  for (auto& future : futures) {
    out << future.get();
    if (!out) throw IoError("write failed in shard " + std::to_string(shard_index));
    ++shard_index;
  }
}

bool SubstituteFileReader::next(SubstituteFileRow& row) {
  std::string line;
  if (!std::getline(in_, line)) return false;
  ++line_no_;
  row.sentence_end = false;
  row.word.clear();
  row.subs.clear();
  if (line == Vocabulary::kEos) {
    row.sentence_end = true;
    return true;
  }
  std::size_t start = 0;
  std::size_t tab = line.find('\t');
  if (tab == std::string::npos) {
    throw ParseError(source_, line_no_, "expected word followed by substitute fields");
  }
  row.word = line.substr(0, tab);
  start = tab + 1;
  while (start <= line.size()) {
    tab = line.find('\t', start);
    const std::size_t end = tab == std::string::npos ? line.size() : tab;
    const std::size_t space = line.rfind(' ', end);
    if (space == std::string::npos || space < start) {
      throw ParseError(source_, line_no_, "malformed substitute field");
    }
    const std::string word = line.substr(start, space - start);
    double prob = 0.0;
    try {
      prob = std::stod(line.substr(space + 1, end - space - 1));
    } catch (const std::exception&) {
      throw ParseError(source_, line_no_, "bad substitute probability");
    }
    row.subs.emplace_back(word, prob);
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (row.subs.empty()) {
    throw ParseError(source_, line_no_, "token row has no substitutes");
  }
  return true;
}

}  // namespace scembed
