#include "kn_reference.hpp"

#include <algorithm>

namespace scembed::testing {

KnReference::KnReference(const CountTable& counts, const Vocabulary& vocab)
    : order_(counts.order()),
      bos_(vocab.bos_id()),
      uniform_(1.0 / static_cast<double>(vocab.size() - 1)) {
  used_.resize(static_cast<std::size_t>(order_));
  contexts_.resize(static_cast<std::size_t>(order_));
  discount_.resize(static_cast<std::size_t>(order_));

  for (const auto& [gram, count] : counts.grams(order_)) {
    used_[static_cast<std::size_t>(order_ - 1)][Key(gram.view().begin(), gram.view().end())] = count;
  }
  for (int k = order_ - 1; k >= 1; --k) {
    auto& table = used_[static_cast<std::size_t>(k - 1)];
    for (const auto& [gram, count] : counts.grams(k + 1)) {
      const auto view = gram.view();
      table[Key(view.begin() + 1, view.end())] += 1;
    }
    for (const auto& [gram, count] : counts.grams(k)) {
      if (gram.front() == bos_) {
        table[Key(gram.view().begin(), gram.view().end())] = count;
      }
    }
  }

  for (int k = 1; k <= order_; ++k) {
    long long n1 = 0, n2 = 0;
    for (const auto& [key, count] : used_[static_cast<std::size_t>(k - 1)]) {
      if (count == 1) ++n1;
      if (count == 2) ++n2;
    }
    discount_[static_cast<std::size_t>(k - 1)] =
        (n1 > 0 && n2 > 0) ? static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2) : 0.5;
    for (const auto& [key, count] : used_[static_cast<std::size_t>(k - 1)]) {
      Key context(key.begin(), key.end() - 1);
      auto& stats = contexts_[static_cast<std::size_t>(k - 1)][context];
      stats.first += count;
      stats.second += 1;
    }
  }
}

double KnReference::conditional(int k, const Key& history, WordId word) const {
  if (k == 0) return uniform_;
  const auto& ctx_map = contexts_[static_cast<std::size_t>(k - 1)];
  const auto ctx_it = ctx_map.find(history);
  Key shorter(history.empty() ? history : Key(history.begin() + 1, history.end()));
  if (ctx_it == ctx_map.end()) {
    return conditional(k - 1, shorter, word);
  }
  const double total = static_cast<double>(ctx_it->second.first);
  const double types = static_cast<double>(ctx_it->second.second);
  const double d = discount_[static_cast<std::size_t>(k - 1)];
  Key key = history;
  key.push_back(word);
  const auto& table = used_[static_cast<std::size_t>(k - 1)];
  const auto it = table.find(key);
  const double count = it == table.end() ? 0.0 : static_cast<double>(it->second);
  const double discounted = std::max(count - d, 0.0) / total;
  const double gamma = d * types / total;
  return discounted + gamma * conditional(k - 1, shorter, word);
}

double KnReference::prob(WordId word, std::vector<WordId> history) const {
  const std::size_t max_hist = static_cast<std::size_t>(order_ - 1);
  if (history.size() > max_hist) {
    history.erase(history.begin(), history.end() - static_cast<std::ptrdiff_t>(max_hist));
  }
  return conditional(static_cast<int>(history.size()) + 1, history, word);
}

}  // namespace scembed::testing
