#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "scembed/common.hpp"
#include "scembed/discretize.hpp"
#include "scembed/rng.hpp"

namespace scembed {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar squared_distance(const Eigen::MatrixBase<DerivedA>& u,
                                           const Eigen::MatrixBase<DerivedB>& v) {
  if (u.size() != v.size()) {
    throw ValidationError("squared_distance: dimension mismatch (" + std::to_string(u.size()) +
                          " vs " + std::to_string(v.size()) + ")");
  }
  return (u.derived() - v.derived()).squaredNorm();
}

template <typename Derived>
VectorX<typename Derived::Scalar> project_to_sphere(const Eigen::MatrixBase<Derived>& v) {
  const auto norm = v.norm();
  if (!(norm > 0)) throw ValidationError("cannot project the zero vector to the sphere");
  return v.derived() / norm;
}

// Frequencies of x, of y, and of (x, y) over an observed pair sample.
struct EmpiricalDistribution {
  Eigen::VectorXd px;
  Eigen::VectorXd py;
  std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> joint;  // sorted by (x, y)
  std::int64_t num_pairs = 0;

  static EmpiricalDistribution from_pairs(std::span<const CooccurrencePair> pairs,
                                          Eigen::Index num_x, Eigen::Index num_y);
};

// Unit-norm columns: phi holds one d-vector per x, psi one per y.
template <typename Scalar = double>
struct EmbeddingSet {
  MatrixX<Scalar> phi;
  MatrixX<Scalar> psi;

  Eigen::Index dim() const { return phi.rows(); }
};

struct TrainConfig {
  Eigen::Index dim = 50;
  double z_constant = 0.166;
  double lambda0 = 0.5;
  double nu = 50.0;
  int epochs = 20;
  std::uint64_t seed = 1;

  void validate() const {
    if (dim < 1) throw ValidationError("scode.d must be >= 1");
    if (!(z_constant > 0.0)) throw ValidationError("scode.z_constant must be > 0");
    if (!(lambda0 > 0.0)) throw ValidationError("scode.lambda0 must be > 0");
    if (!(nu > 0.0)) throw ValidationError("scode.nu must be > 0");
    if (epochs < 0) throw ValidationError("scode.epochs must be >= 0");
  }
};

// Columns drawn from a rotation-invariant distribution (independent standard
// normals) and projected to the sphere. The fill order is pinned: phi column
// by column, then psi.
template <typename Scalar = double>
EmbeddingSet<Scalar> init_embeddings(Eigen::Index num_x, Eigen::Index num_y, Eigen::Index dim,
                                     std::uint64_t seed) {
  if (dim < 1) throw ValidationError("embedding dimension must be >= 1");
  RngStream rng(seed);
  EmbeddingSet<Scalar> emb;
  emb.phi.resize(dim, num_x);
  emb.psi.resize(dim, num_y);
  auto fill = [&](MatrixX<Scalar>& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      do {
        for (Eigen::Index r = 0; r < dim; ++r) {
          m(r, c) = static_cast<Scalar>(rng.gaussian());
        }
      } while (!(m.col(c).norm() > Scalar(1e-12)));
      m.col(c) /= m.col(c).norm();
    }
  };
  fill(emb.phi);
  fill(emb.psi);
  return emb;
}

// Exact partition value Z = sum_xy px(x) py(y) exp(-d2(x,y)). Enumerates the
// full product space; intended for oracle-sized instances.
template <typename Scalar>
double exact_partition(const EmbeddingSet<Scalar>& emb, const EmpiricalDistribution& emp) {
  double z = 0.0;
  for (Eigen::Index i = 0; i < emp.px.size(); ++i) {
    for (Eigen::Index j = 0; j < emp.py.size(); ++j) {
      const double d2 = static_cast<double>((emb.phi.col(i) - emb.psi.col(j)).squaredNorm());
      z += emp.px(i) * emp.py(j) * std::exp(-d2);
    }
  }
  return z;
}

// Model log-likelihood sum_xy p(x,y) log( px(x) py(y) exp(-d2) / Z ) over the
// observed joint.
template <typename Scalar>
double exact_log_likelihood(const EmbeddingSet<Scalar>& emb, const EmpiricalDistribution& emp) {
  const double log_z = std::log(exact_partition(emb, emp));
  double ll = 0.0;
  for (const auto& [i, j, f] : emp.joint) {
    const double d2 = static_cast<double>((emb.phi.col(i) - emb.psi.col(j)).squaredNorm());
    ll += f * (std::log(emp.px(i)) + std::log(emp.py(j)) - d2 - log_z);
  }
  return ll;
}

template <typename Scalar>
struct GradientPair {
  MatrixX<Scalar> phi;
  MatrixX<Scalar> psi;
};

// Ambient gradient of the exact log-likelihood: per observed pair an
// attraction term 2 p(x,y) (psi - phi), plus the partition gradient, a
// repulsion term (2/Z) px py exp(-d2) (phi - psi), summed over the full
// product space.
template <typename Scalar>
GradientPair<Scalar> exact_gradient(const EmbeddingSet<Scalar>& emb,
                                    const EmpiricalDistribution& emp) {
  GradientPair<Scalar> grad;
  grad.phi = MatrixX<Scalar>::Zero(emb.dim(), emb.phi.cols());
  grad.psi = MatrixX<Scalar>::Zero(emb.dim(), emb.psi.cols());
  for (const auto& [i, j, f] : emp.joint) {
    grad.phi.col(i) += Scalar(2 * f) * (emb.psi.col(j) - emb.phi.col(i));
    grad.psi.col(j) += Scalar(2 * f) * (emb.phi.col(i) - emb.psi.col(j));
  }
  const double z = exact_partition(emb, emp);
  for (Eigen::Index i = 0; i < emp.px.size(); ++i) {
    for (Eigen::Index j = 0; j < emp.py.size(); ++j) {
      const double d2 = static_cast<double>((emb.phi.col(i) - emb.psi.col(j)).squaredNorm());
      const double w = 2.0 / z * emp.px(i) * emp.py(j) * std::exp(-d2);
      grad.phi.col(i) += Scalar(w) * (emb.phi.col(i) - emb.psi.col(j));
      grad.psi.col(j) += Scalar(w) * (emb.psi.col(j) - emb.phi.col(i));
    }
  }
  return grad;
}

// Full-batch projected gradient ascent with the exact partition value.
// Returns the log-likelihood after each iteration.
template <typename Scalar>
std::vector<double> full_batch_ascent(EmbeddingSet<Scalar>& emb, const EmpiricalDistribution& emp,
                                      double step, int iterations) {
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(iterations));
  for (int it = 0; it < iterations; ++it) {
    const GradientPair<Scalar> grad = exact_gradient(emb, emp);
    emb.phi += Scalar(step) * grad.phi;
    emb.psi += Scalar(step) * grad.psi;
    for (Eigen::Index c = 0; c < emb.phi.cols(); ++c) emb.phi.col(c) = project_to_sphere(emb.phi.col(c));
    for (Eigen::Index c = 0; c < emb.psi.cols(); ++c) emb.psi.col(c) = project_to_sphere(emb.psi.col(c));
    trace.push_back(exact_log_likelihood(emb, emp));
  }
  return trace;
}

namespace detail {

// Simultaneous attraction update on an observed pair, then re-projection.
template <typename Scalar>
void attract(EmbeddingSet<Scalar>& emb, Eigen::Index x, Eigen::Index y, Scalar lambda_x,
             Scalar lambda_y, VectorX<Scalar>& fx, VectorX<Scalar>& fy) {
  fx = emb.phi.col(x);
  fy = emb.psi.col(y);
  emb.phi.col(x) += (2 * lambda_x) * (fy - fx);
  emb.psi.col(y) += (2 * lambda_y) * (fx - fy);
  const Scalar nx = emb.phi.col(x).norm();
  const Scalar ny = emb.psi.col(y).norm();
  if (!(nx > 0) || !(ny > 0)) throw ValidationError("update collapsed a vector to zero");
  emb.phi.col(x) /= nx;
  emb.psi.col(y) /= ny;
}

// Simultaneous repulsion update on a noise pair, then re-projection.
template <typename Scalar>
void repulse(EmbeddingSet<Scalar>& emb, Eigen::Index x, Eigen::Index y, Scalar inv_z,
             Scalar lambda_x, Scalar lambda_y, VectorX<Scalar>& fx, VectorX<Scalar>& fy) {
  fx = emb.phi.col(x);
  fy = emb.psi.col(y);
  const Scalar weight = inv_z * std::exp(-(fx - fy).squaredNorm());
  emb.phi.col(x) += (lambda_x * weight) * (fx - fy);
  emb.psi.col(y) += (lambda_y * weight) * (fy - fx);
  const Scalar nx = emb.phi.col(x).norm();
  const Scalar ny = emb.psi.col(y).norm();
  if (!(nx > 0) || !(ny > 0)) throw ValidationError("update collapsed a vector to zero");
  emb.phi.col(x) /= nx;
  emb.psi.col(y) /= ny;
}

}  // namespace detail

// One stochastic update: attraction on the observed pair, repulsion on the
// noise pair under the constant partition approximation, all four touched
// vectors re-projected. A uniform step size applies to every vector.
template <typename Scalar>
void sgd_step(CooccurrencePair observed, CooccurrencePair noise, EmbeddingSet<Scalar>& emb,
              const TrainConfig& config, double lambda) {
  config.validate();
  VectorX<Scalar> fx(emb.dim()), fy(emb.dim());
  detail::attract(emb, observed.x, observed.y, Scalar(lambda), Scalar(lambda), fx, fy);
  detail::repulse(emb, noise.x, noise.y, Scalar(1.0 / config.z_constant), Scalar(lambda),
                  Scalar(lambda), fx, fy);
}

template <typename Scalar = double>
struct TrainResult {
  EmbeddingSet<Scalar> embeddings;
  std::optional<double> exact_ll;  // reported when |X|*|Y| is enumerable
};

// Stochastic trainer: one fixed seeded shuffle of the pairs, iterated for
// config.epochs passes. Each observed pair triggers one noise pair drawn from
// the product of the empirical marginals. Step sizes decay per vector as
// lambda0 * nu / (nu + t) with t that vector's own update count.
template <typename Scalar = double>
TrainResult<Scalar> train(std::span<const CooccurrencePair> pairs, const TrainConfig& config) {
  config.validate();
  if (pairs.empty()) throw ValidationError("cannot train on an empty pair stream");

  Eigen::Index num_x = 0, num_y = 0;
  for (const CooccurrencePair& pair : pairs) {
    if (pair.x < 0 || pair.y < 0) throw ValidationError("pair ids must be non-negative");
    num_x = std::max<Eigen::Index>(num_x, pair.x + 1);
    num_y = std::max<Eigen::Index>(num_y, pair.y + 1);
  }

  const EmpiricalDistribution emp = EmpiricalDistribution::from_pairs(pairs, num_x, num_y);
  Eigen::VectorXd cum_x(num_x), cum_y(num_y);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < num_x; ++i) cum_x(i) = (acc += emp.px(i));
  acc = 0.0;
  for (Eigen::Index j = 0; j < num_y; ++j) cum_y(j) = (acc += emp.py(j));
  auto draw = [](const Eigen::VectorXd& cum, double u) {
    const double* begin = cum.data();
    const double* end = begin + cum.size();
    const double* it = std::upper_bound(begin, end, u);
    if (it == end) --it;
    return static_cast<Eigen::Index>(it - begin);
  };

  TrainResult<Scalar> result;
  result.embeddings = init_embeddings<Scalar>(num_x, num_y, config.dim,
                                              derive_seed(config.seed, "init"));
  EmbeddingSet<Scalar>& emb = result.embeddings;

  std::vector<CooccurrencePair> order(pairs.begin(), pairs.end());
  RngStream shuffle_rng = derive_stream(config.seed, "shuffle");
  shuffle(std::span<CooccurrencePair>(order), shuffle_rng);

  RngStream noise_rng = derive_stream(config.seed, "noise");
  std::vector<std::int64_t> steps_x(static_cast<std::size_t>(num_x), 0);
  std::vector<std::int64_t> steps_y(static_cast<std::size_t>(num_y), 0);
  auto next_lambda = [&](std::vector<std::int64_t>& steps, Eigen::Index i) {
    const double t = static_cast<double>(steps[static_cast<std::size_t>(i)]++);
    return Scalar(config.lambda0 * config.nu / (config.nu + t));
  };

  const Scalar inv_z = Scalar(1.0 / config.z_constant);
  VectorX<Scalar> fx(config.dim), fy(config.dim);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const CooccurrencePair& pair : order) {
      detail::attract(emb, pair.x, pair.y, next_lambda(steps_x, pair.x),
                      next_lambda(steps_y, pair.y), fx, fy);
      const Eigen::Index nx = draw(cum_x, noise_rng.uniform());
      const Eigen::Index ny = draw(cum_y, noise_rng.uniform());
      detail::repulse(emb, nx, ny, inv_z, next_lambda(steps_x, nx), next_lambda(steps_y, ny), fx,
                      fy);
    }
  }

  if (num_x * num_y <= (Eigen::Index(1) << 22)) {
    result.exact_ll = exact_log_likelihood(emb, emp);
  }
  return result;
}

// Embeddings text interchange: "count dim" header, then one row per word
// with six-decimal coordinates. An optional uniform scale is applied on
// write only.
template <typename Scalar>
void write_embeddings(std::ostream& out, std::span<const std::string> words,
                      const MatrixX<Scalar>& vectors, double scale = 1.0) {
  if (static_cast<Eigen::Index>(words.size()) != vectors.cols()) {
    throw ValidationError("word list and embedding matrix size mismatch");
  }
  out << words.size() << ' ' << vectors.rows() << '\n';
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    out << words[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      out << ' ' << format_fixed(static_cast<double>(vectors(r, c)) * scale, 6);
    }
    out << '\n';
  }
}

struct LoadedEmbeddings {
  std::vector<std::string> words;
  MatrixX<double> vectors;
};

LoadedEmbeddings read_embeddings(std::istream& in, std::string_view source_name);

}  // namespace scembed
