#include "graphfield/graph.hpp"
#include "graphfield/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace graphfield {

SparseSymmetric::SparseSymmetric(Index n, std::vector<Entry> entries)
    : n_(n), entries_(std::move(entries)) {
  std::vector<Triplet> trips;
  trips.reserve(2 * entries_.size());
  for (const auto& e : entries_) {
    if (e.i > e.j)
      throw std::invalid_argument("SparseSymmetric: entries must have i <= j");
    if (e.i < 0 || e.j >= n_)
      throw std::invalid_argument("SparseSymmetric: index out of range");
    if (!std::isfinite(e.value))
      throw std::invalid_argument("SparseSymmetric: non-finite value");
    trips.emplace_back(e.i, e.j, e.value);
    if (e.i != e.j) trips.emplace_back(e.j, e.i, e.value);
  }
  mat_.resize(n_, n_);
  mat_.setFromTriplets(trips.begin(), trips.end());
  mat_.makeCompressed();
}

Index SparseSymmetric::nonzero_count() const {
  Index nnz = 0;
  for (const auto& e : entries_) nnz += (e.i == e.j) ? 1 : 2;
  return nnz;
}

bool SparseSymmetric::no_edges() const {
  return std::none_of(entries_.begin(), entries_.end(),
                      [](const Entry& e) { return e.i != e.j; });
}

Vector SparseSymmetric::row_sums() const {
  Vector d = Vector::Zero(n_);
  for (const auto& e : entries_) {
    d[e.i] += e.value;
    if (e.i != e.j) d[e.j] += e.value;
  }
  return d;
}

void SparseSymmetric::write_matrix_market(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << n_ << " " << n_ << " " << entries_.size() << "\n";
  out << std::setprecision(17);
  // symmetric MM stores the lower triangle: row >= col
  for (const auto& e : entries_)
    out << (e.j + 1) << " " << (e.i + 1) << " " << e.value << "\n";
}

namespace {

SparseSymmetric weights_from_neighbors(const NeighborLists& nbrs,
                                       Index n, double scale,
                                       const Vector* kappa) {
  std::vector<SparseSymmetric::Entry> entries;
  for (Index i = 0; i < n; ++i)
    for (const auto& nb : nbrs.lists[static_cast<std::size_t>(i)]) {
      if (nb.index <= i) continue;  // store once per pair
      double w = scale;
      if (kappa) w *= std::sqrt((*kappa)[i] * (*kappa)[nb.index]);
      entries.push_back({i, nb.index, w});
    }
  return SparseSymmetric(n, std::move(entries));
}

}  // namespace

SparseSymmetric epsilon_weights(const PointCloud& cloud, double h, int m,
                                double vol) {
  if (h <= 0.0) throw std::invalid_argument("epsilon_weights: h must be > 0");
  if (m < 1) throw std::invalid_argument("epsilon_weights: m must be >= 1");
  if (vol <= 0.0)
    throw std::invalid_argument("epsilon_weights: vol must be > 0");
  const Index n = cloud.n();
  const double scale =
      2.0 * (m + 2) * vol / (n * unit_ball_volume(m) * std::pow(h, m + 2));
  return weights_from_neighbors(neighbors_within(cloud, h), n, scale, nullptr);
}

SparseSymmetric kappa_weights(const PointCloud& cloud, double h, int m,
                              double vol, const Vector& kappa) {
  if (kappa.size() != cloud.n())
    throw std::invalid_argument("kappa_weights: kappa size mismatch");
  if ((kappa.array() <= 0.0).any())
    throw std::invalid_argument("kappa_weights: kappa must be positive");
  if (h <= 0.0) throw std::invalid_argument("kappa_weights: h must be > 0");
  const Index n = cloud.n();
  const double scale =
      2.0 * (m + 2) * vol / (n * unit_ball_volume(m) * std::pow(h, m + 2));
  return weights_from_neighbors(neighbors_within(cloud, h), n, scale, &kappa);
}

SparseSymmetric kappa_scale(const SparseSymmetric& weights,
                            const Vector& kappa) {
  if (kappa.size() != weights.size())
    throw std::invalid_argument("kappa_scale: kappa size mismatch");
  if ((kappa.array() <= 0.0).any())
    throw std::invalid_argument("kappa_scale: kappa must be positive");
  auto entries = weights.entries();
  for (auto& e : entries) e.value *= std::sqrt(kappa[e.i] * kappa[e.j]);
  return SparseSymmetric(weights.size(), std::move(entries));
}

SparseSymmetric density_corrected_weights(const PointCloud& cloud, double h,
                                          int m) {
  if (h <= 0.0)
    throw std::invalid_argument("density_corrected_weights: h must be > 0");
  const Index n = cloud.n();
  auto nbrs = neighbors_within(cloud, h);
  // q(x_i) = (1/(n nu_m h^m)) * #{j : |x_i - x_j| < h}, self included
  const double q_scale = 1.0 / (n * unit_ball_volume(m) * std::pow(h, m));
  Vector q(n);
  for (Index i = 0; i < n; ++i)
    q[i] = q_scale *
           (1.0 + static_cast<double>(nbrs.lists[static_cast<std::size_t>(i)].size()));
  const double scale =
      (m + 2) / (n * unit_ball_volume(m) * std::pow(h, m + 2));
  std::vector<SparseSymmetric::Entry> entries;
  for (Index i = 0; i < n; ++i)
    for (const auto& nb : nbrs.lists[static_cast<std::size_t>(i)]) {
      if (nb.index <= i) continue;
      entries.push_back(
          {i, nb.index, scale * (1.0 / q[i] + 1.0 / q[nb.index])});
    }
  return SparseSymmetric(n, std::move(entries));
}

SparseSymmetric selftuning_knn_weights(const PointCloud& cloud, Index k) {
  auto nbrs = knn(cloud, k);
  const Index n = cloud.n();
  for (Index i = 0; i < n; ++i)
    if (nbrs.knn_delta[i] <= 0.0)
      throw std::invalid_argument(
          "selftuning_knn_weights: node " + std::to_string(i) +
          " has a coincident k-th neighbor (delta = 0)");
  std::vector<SparseSymmetric::Entry> entries;
  for (Index i = 0; i < n; ++i)
    for (const auto& nb : nbrs.lists[static_cast<std::size_t>(i)]) {
      if (nb.index <= i) continue;
      const double w = std::exp(-nb.dist * nb.dist /
                                (2.0 * nbrs.knn_delta[i] *
                                 nbrs.knn_delta[nb.index]));
      entries.push_back({i, nb.index, w});
    }
  return SparseSymmetric(n, std::move(entries));
}

SparseSymmetric distance_gaussian_weights(const EdgeListInput& input) {
  if (input.edges.empty())
    throw std::invalid_argument("distance_gaussian_weights: empty edge list");
  double mean = 0.0;
  for (const auto& e : input.edges) mean += e.dist;
  mean /= static_cast<double>(input.edges.size());
  if (mean <= 0.0)
    throw std::invalid_argument(
        "distance_gaussian_weights: mean distance must be positive");
  std::vector<SparseSymmetric::Entry> entries;
  entries.reserve(input.edges.size());
  for (const auto& e : input.edges) {
    const auto [lo, hi] = std::minmax(e.i, e.j);
    entries.push_back(
        {lo, hi, std::exp(-e.dist * e.dist / (2.0 * mean * mean))});
  }
  return SparseSymmetric(input.n, std::move(entries));
}

Laplacian laplacian(const SparseSymmetric& weights, LaplacianKind kind) {
  for (const auto& e : weights.entries())
    if (e.i != e.j && e.value < 0.0)
      throw std::invalid_argument("laplacian: negative off-diagonal weight");
  const Index n = weights.size();
  Vector deg = weights.row_sums();
  if (kind != LaplacianKind::Unnormalized && (deg.array() <= 0.0).any())
    throw std::invalid_argument(
        "laplacian: normalized kinds require positive degrees");

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(weights.nonzero_count()) + n);
  auto push_sym = [&](Index i, Index j, double v) {
    trips.emplace_back(i, j, v);
    if (i != j) trips.emplace_back(j, i, v);
  };
  // setFromTriplets sums duplicates, so diagonal W entries fold in correctly.
  switch (kind) {
    case LaplacianKind::Unnormalized:
      for (Index i = 0; i < n; ++i) trips.emplace_back(i, i, deg[i]);
      for (const auto& e : weights.entries()) push_sym(e.i, e.j, -e.value);
      break;
    case LaplacianKind::Symmetric:
      for (Index i = 0; i < n; ++i) trips.emplace_back(i, i, 1.0);
      for (const auto& e : weights.entries())
        push_sym(e.i, e.j, -e.value / std::sqrt(deg[e.i] * deg[e.j]));
      break;
    case LaplacianKind::RandomWalk:
      for (Index i = 0; i < n; ++i) trips.emplace_back(i, i, 1.0);
      for (const auto& e : weights.entries()) {
        trips.emplace_back(e.i, e.j, -e.value / deg[e.i]);
        if (e.i != e.j) trips.emplace_back(e.j, e.i, -e.value / deg[e.j]);
      }
      break;
  }
  SpMat mat(n, n);
  mat.setFromTriplets(trips.begin(), trips.end());
  mat.makeCompressed();
  return Laplacian(kind, std::move(mat), std::move(deg));
}

double quadratic_form(const Laplacian& lap, const Vector& u) {
  if (u.size() != lap.size())
    throw std::invalid_argument("quadratic_form: dimension mismatch");
  return u.dot(lap.matrix() * u);
}

}  // namespace graphfield
