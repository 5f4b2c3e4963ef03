#include "scembed/ngram.hpp"

#include <algorithm>
#include <cmath>

namespace scembed {

namespace {

std::vector<WordId> pad_sentence(std::span<const WordId> sentence, int order, const Vocabulary& vocab) {
  std::vector<WordId> padded;
  padded.reserve(sentence.size() + static_cast<std::size_t>(order));
  padded.assign(static_cast<std::size_t>(order - 1), vocab.bos_id());
  padded.insert(padded.end(), sentence.begin(), sentence.end());
  padded.push_back(vocab.eos_id());
  return padded;
}

}  // namespace

CountTable::CountTable(int order) : order_(order) {
  if (order < 1) throw ValidationError("n-gram order must be >= 1");
  if (order > kMaxOrder) {
    throw ValidationError("n-gram order must be <= " + std::to_string(kMaxOrder));
  }
  maps_.resize(static_cast<std::size_t>(order));
}

void CountTable::add_sentence(std::span<const WordId> sentence, const Vocabulary& vocab) {
  if (sentence.empty()) return;
  for (WordId w : sentence) {
    if (w < 0 || w >= vocab.size()) throw ValidationError("word id " + std::to_string(w) + " out of range");
    if (vocab.is_marker(w)) throw ValidationError("sentence contains a boundary marker id");
  }
  const std::vector<WordId> padded = pad_sentence(sentence, order_, vocab);
  const std::size_t first_target = static_cast<std::size_t>(order_ - 1);
  for (std::size_t t = first_target; t < padded.size(); ++t) {
    for (int k = 1; k <= order_; ++k) {
      const std::size_t start = t + 1 - static_cast<std::size_t>(k);
      maps_[static_cast<std::size_t>(k - 1)][Gram::of({padded.data() + start, static_cast<std::size_t>(k)})] += 1;
    }
    ++total_events_;
  }
}

CountTable count_ngrams(std::span<const std::vector<WordId>> corpus, int order, const Vocabulary& vocab) {
  CountTable table(order);
  for (const auto& sentence : corpus) {
    table.add_sentence(sentence, vocab);
  }
  return table;
}

NgramModel::NgramModel(int order, Vocabulary vocab) : order_(order), vocab_(std::move(vocab)) {
  if (order < 1 || order > kMaxOrder) throw ValidationError("n-gram order out of range");
  tables_.resize(static_cast<std::size_t>(order));
}

void NgramModel::set_prob(std::span<const WordId> gram, double logp) {
  NgramEntry& e = tables_[gram.size() - 1][Gram::of(gram)];
  e.logp = logp;
  e.has_prob = true;
}

void NgramModel::set_bow(std::span<const WordId> gram, double bow) {
  NgramEntry& e = tables_[gram.size() - 1][Gram::of(gram)];
  e.bow = bow;
  e.has_bow = true;
}

const NgramEntry* NgramModel::find(std::span<const WordId> gram) const {
  const Map& table = tables_[gram.size() - 1];
  auto it = table.find(Gram::of(gram));
  return it == table.end() ? nullptr : &it->second;
}

std::vector<Gram> NgramModel::sorted_grams(int k) const {
  std::vector<Gram> grams;
  grams.reserve(entries(k).size());
  for (const auto& [gram, entry] : entries(k)) grams.push_back(gram);
  std::sort(grams.begin(), grams.end());
  return grams;
}

double NgramModel::logprob(WordId word, std::span<const WordId> history) const {
  if (word < 0 || word >= vocab_.size()) {
    throw ValidationError("unknown word id " + std::to_string(word));
  }
  if (word == vocab_.bos_id()) {
    throw ValidationError("the begin-of-sentence marker cannot be a prediction target");
  }
  const std::size_t max_hist = static_cast<std::size_t>(order_ - 1);
  if (history.size() > max_hist) history = history.last(max_hist);

  double backoff_acc = 0.0;
  std::size_t hlen = history.size();
  for (;;) {
    Gram g = Gram::of(history.last(hlen)).appended(word);
    const auto& table = tables_[hlen];
    auto it = table.find(g);
    if (it != table.end() && it->second.has_prob) {
      return backoff_acc + it->second.logp;
    }
    if (hlen == 0) {
      throw ValidationError("word \"" + vocab_.word(word) + "\" has no unigram entry");
    }
    const auto& ctx_table = tables_[hlen - 1];
    auto ctx_it = ctx_table.find(Gram::of(history.last(hlen)));
    if (ctx_it != ctx_table.end() && ctx_it->second.has_bow) {
      backoff_acc += ctx_it->second.bow;
    }
    --hlen;
  }
}

NgramModel estimate_kn(const CountTable& counts, const Vocabulary& vocab, KnDiagnostics* diagnostics) {
  if (counts.total_events() == 0) {
    throw ValidationError("cannot estimate a model from empty counts");
  }
  const int n = counts.order();
  const WordId bos = vocab.bos_id();
  const double v_pred = static_cast<double>(vocab.size() - 1);

  // Counts actually smoothed per order: raw at the top, continuation counts
  // below. Grams starting with the begin marker can never be preceded, so
  // they keep their raw counts.
  std::vector<CountTable::Map> used(static_cast<std::size_t>(n));
  used[static_cast<std::size_t>(n - 1)] = counts.grams(n);
  for (int k = n - 1; k >= 1; --k) {
    CountTable::Map& m = used[static_cast<std::size_t>(k - 1)];
    for (const auto& [gram, count] : counts.grams(k + 1)) {
      m[gram.tail()] += 1;
    }
    for (const auto& [gram, count] : counts.grams(k)) {
      if (gram.front() == bos) m[gram] = count;
    }
  }

  std::vector<double> discount(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    std::int64_t n1 = 0, n2 = 0;
    for (const auto& [gram, count] : used[static_cast<std::size_t>(k - 1)]) {
      if (count == 1) ++n1;
      if (count == 2) ++n2;
    }
    discount[static_cast<std::size_t>(k - 1)] =
        (n1 > 0 && n2 > 0) ? static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2) : 0.5;
  }
  if (diagnostics) diagnostics->discounts = discount;

  // Per-context totals and distinct continuation counts.
  struct ContextStats {
    std::int64_t total = 0;
    std::int64_t types = 0;
  };
  std::vector<std::unordered_map<Gram, ContextStats, GramHash>> context(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    auto& ctx_map = context[static_cast<std::size_t>(k - 1)];
    for (const auto& [gram, count] : used[static_cast<std::size_t>(k - 1)]) {
      ContextStats& stats = ctx_map[gram.prefix()];
      stats.total += count;
      stats.types += 1;
    }
  }

  NgramModel model(n, vocab);

  // Unigrams cover the whole predictable vocabulary; words without counts
  // receive only interpolated uniform mass.
  {
    const double d1 = discount[0];
    const ContextStats& stats = context[0].at(Gram{});
    const double total = static_cast<double>(stats.total);
    const double interp = d1 * static_cast<double>(stats.types) / total / v_pred;
    const auto& table = used[0];
    for (WordId w = 0; w < vocab.size(); ++w) {
      if (w == bos) continue;
      auto it = table.find(Gram::of({&w, 1}));
      const double u = it == table.end() ? 0.0 : static_cast<double>(it->second);
      const double discounted = u > d1 ? (u - d1) / total : 0.0;
      model.set_prob({&w, 1}, std::log(discounted + interp));
    }
  }

  for (int k = 2; k <= n; ++k) {
    const double dk = discount[static_cast<std::size_t>(k - 1)];
    const auto& ctx_map = context[static_cast<std::size_t>(k - 1)];
    for (const auto& [gram, count] : used[static_cast<std::size_t>(k - 1)]) {
      const ContextStats& stats = ctx_map.at(gram.prefix());
      const double total = static_cast<double>(stats.total);
      const double u = static_cast<double>(count);
      const double discounted = u > dk ? (u - dk) / total : 0.0;
      const double gamma = dk * static_cast<double>(stats.types) / total;
      const NgramEntry* lower = model.find(gram.tail().view());
      if (lower == nullptr || !lower->has_prob) {
        throw ValidationError("internal estimation error: missing lower-order entry");
      }
      model.set_prob(gram.view(), std::log(discounted + gamma * std::exp(lower->logp)));
    }
    for (const auto& [ctx, stats] : ctx_map) {
      const double gamma =
          dk * static_cast<double>(stats.types) / static_cast<double>(stats.total);
      model.set_bow(ctx.view(), std::log(gamma));
    }
  }

  return model;
}

double perplexity(const NgramModel& model, std::span<const std::vector<WordId>> corpus) {
  const int n = model.order();
  double log_sum = 0.0;
  std::int64_t targets = 0;
  for (const auto& sentence : corpus) {
    if (sentence.empty()) continue;
    const std::vector<WordId> padded = pad_sentence(sentence, n, model.vocab());
    for (std::size_t t = static_cast<std::size_t>(n - 1); t < padded.size(); ++t) {
      log_sum += model.logprob(padded[t], {padded.data() + t - static_cast<std::size_t>(n - 1),
                                           static_cast<std::size_t>(n - 1)});
      ++targets;
    }
  }
  if (targets == 0) throw ValidationError("perplexity of an empty corpus is undefined");
  return std::exp(-log_sum / static_cast<double>(targets));
}

}  // namespace scembed
