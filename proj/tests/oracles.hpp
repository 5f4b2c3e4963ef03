#pragma once

// Shared independent oracles for verification: full chain-rule context
// scoring, finite-difference gradients, direct likelihood enumeration, and
// synthetic pair generators. Everything here goes through public API only
// and re-derives its answers from first principles.

#include <algorithm>
#include <cmath>
#include <vector>

#include "scembed/ngram.hpp"
#include "scembed/rng.hpp"
#include "scembed/scode.hpp"

namespace scembed::testing {

// Window joint log-probability via the full chain rule: every window word
// conditioned on all the window words before it (the model truncates long
// histories itself). Terms predicting the leading begin-marker padding are
// skipped; they carry no candidate dependence. Candidate-dependent terms
// coincide with context_score, the rest are a per-position constant.
inline double chain_rule_score(const NgramModel& model, std::span<const WordId> sentence,
                               int position, WordId candidate) {
  const int n = model.order();
  std::vector<WordId> padded(static_cast<std::size_t>(n - 1), model.vocab().bos_id());
  padded.insert(padded.end(), sentence.begin(), sentence.end());
  padded.push_back(model.vocab().eos_id());
  const std::size_t target = static_cast<std::size_t>(position + n - 1);
  padded[target] = candidate;
  const std::size_t window_start = target - static_cast<std::size_t>(n - 1);
  const std::size_t window_end =
      std::min(target + static_cast<std::size_t>(n - 1), padded.size() - 1);
  double total = 0.0;
  for (std::size_t q = window_start; q <= window_end; ++q) {
    if (padded[q] == model.vocab().bos_id()) continue;
    total += model.logprob(padded[q], {padded.data() + window_start, q - window_start});
  }
  return total;
}

// Direct long-double enumeration of the likelihood, coded independently of
// the Eigen paths.
inline double direct_log_likelihood(const EmbeddingSet<double>& emb,
                                    const EmpiricalDistribution& emp) {
  long double z = 0.0L;
  for (Eigen::Index i = 0; i < emp.px.size(); ++i) {
    for (Eigen::Index j = 0; j < emp.py.size(); ++j) {
      long double d2 = 0.0L;
      for (Eigen::Index r = 0; r < emb.dim(); ++r) {
        const long double diff = static_cast<long double>(emb.phi(r, i)) - emb.psi(r, j);
        d2 += diff * diff;
      }
      z += static_cast<long double>(emp.px(i)) * emp.py(j) * expl(-d2);
    }
  }
  long double ll = 0.0L;
  for (const auto& [i, j, f] : emp.joint) {
    long double d2 = 0.0L;
    for (Eigen::Index r = 0; r < emb.dim(); ++r) {
      const long double diff = static_cast<long double>(emb.phi(r, i)) - emb.psi(r, j);
      d2 += diff * diff;
    }
    ll += f * (logl(static_cast<long double>(emp.px(i))) +
               logl(static_cast<long double>(emp.py(j))) - d2 - logl(z));
  }
  return static_cast<double>(ll);
}

inline Eigen::VectorXd tangent(const Eigen::VectorXd& grad, const Eigen::VectorXd& at) {
  const Eigen::VectorXd unit = at / at.norm();
  return grad - grad.dot(unit) * unit;
}

// Central finite differences of the exact likelihood in ambient coordinates.
inline GradientPair<double> fd_gradient(EmbeddingSet<double> emb, const EmpiricalDistribution& emp,
                                        double h) {
  GradientPair<double> grad;
  grad.phi.resize(emb.dim(), emb.phi.cols());
  grad.psi.resize(emb.dim(), emb.psi.cols());
  auto probe = [&](MatrixX<double>& m, MatrixX<double>& out) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const double saved = m(r, c);
        m(r, c) = saved + h;
        const double up = exact_log_likelihood(emb, emp);
        m(r, c) = saved - h;
        const double down = exact_log_likelihood(emb, emp);
        m(r, c) = saved;
        out(r, c) = (up - down) / (2.0 * h);
      }
    }
  };
  probe(emb.phi, grad.phi);
  probe(emb.psi, grad.psi);
  return grad;
}

// Two clusters: x in {0,1} pairs only with y in {0,1}; x in {2,3} only with
// y in {2,3}.
inline std::vector<CooccurrencePair> two_block_pairs(int count, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<CooccurrencePair> pairs;
  pairs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const WordId block = static_cast<WordId>(rng.bounded(2));
    pairs.push_back({static_cast<WordId>(block * 2 + rng.bounded(2)),
                     static_cast<WordId>(block * 2 + rng.bounded(2))});
  }
  return pairs;
}

inline double max_norm_error(const EmbeddingSet<double>& emb) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < emb.phi.cols(); ++c) {
    worst = std::max(worst, std::abs(emb.phi.col(c).norm() - 1.0));
  }
  for (Eigen::Index c = 0; c < emb.psi.cols(); ++c) {
    worst = std::max(worst, std::abs(emb.psi.col(c).norm() - 1.0));
  }
  return worst;
}

}  // namespace scembed::testing
