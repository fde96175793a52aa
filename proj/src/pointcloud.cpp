#include "graphfield/pointcloud.hpp"
#include "graphfield/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace graphfield {

namespace {

void check_unit_rows(const Matrix& pts, Index want_d, const char* name) {
  if (pts.cols() != want_d)
    throw std::invalid_argument(std::string(name) + " cloud must have d=" +
                                std::to_string(want_d));
  for (Index i = 0; i < pts.rows(); ++i) {
    if (std::abs(pts.row(i).norm() - 1.0) > 1e-12)
      throw std::invalid_argument(std::string(name) + " cloud row " +
                                  std::to_string(i) + " is not unit norm");
  }
}

}  // namespace

PointCloud make_cloud(Matrix points, Manifold manifold) {
  if (points.rows() < 2)
    throw std::invalid_argument("point cloud needs at least 2 points");
  if (!points.allFinite())
    throw std::invalid_argument("point cloud has non-finite coordinates");
  if (manifold == Manifold::Circle) check_unit_rows(points, 2, "circle");
  if (manifold == Manifold::Sphere) check_unit_rows(points, 3, "sphere");
  return PointCloud{std::move(points), manifold};
}

PointCloud sample_circle(Index n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_circle: n must be >= 2");
  Rng rng(seed);
  Matrix pts(n, 2);
  for (Index i = 0; i < n; ++i) {
    const double t = rng.uniform(0.0, 2.0 * kPi);
    pts(i, 0) = std::cos(t);
    pts(i, 1) = std::sin(t);
  }
  return PointCloud{std::move(pts), Manifold::Circle};
}

PointCloud sample_sphere(Index n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_sphere: n must be >= 2");
  Rng rng(seed);
  Matrix pts(n, 3);
  for (Index i = 0; i < n; ++i) {
    double x, y, z, r;
    do {
      x = rng.normal();
      y = rng.normal();
      z = rng.normal();
      r = std::sqrt(x * x + y * y + z * z);
    } while (r < 1e-12);
    pts(i, 0) = x / r;
    pts(i, 1) = y / r;
    pts(i, 2) = z / r;
  }
  return PointCloud{std::move(pts), Manifold::Sphere};
}

namespace {

std::vector<double> parse_numeric_row(const std::string& line, int lineno) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t pos = 0;
      row.push_back(std::stod(cell, &pos));
      // trailing garbage after the number
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
      if (pos != cell.size())
        throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw IngestError("line " + std::to_string(lineno) +
                        ": cannot parse value '" + cell + "'");
    }
  }
  return row;
}

}  // namespace

PointCloud load_points_csv(const std::string& path, Manifold manifold) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open points file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto row = parse_numeric_row(line, lineno);
    if (!rows.empty() && row.size() != rows.front().size())
      throw IngestError("line " + std::to_string(lineno) +
                        ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw IngestError("points file has fewer than 2 rows");
  Matrix pts(static_cast<Index>(rows.size()),
             static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < pts.rows(); ++i)
    for (Index j = 0; j < pts.cols(); ++j)
      pts(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return make_cloud(std::move(pts), manifold);
}

EdgeListInput make_edge_list(Index n, std::vector<EdgeListInput::Edge> edges) {
  std::set<std::pair<Index, Index>> seen;
  for (const auto& e : edges) {
    if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n)
      throw std::invalid_argument("edge index out of range");
    if (e.i == e.j) throw std::invalid_argument("self-edge not allowed");
    if (e.dist < 0.0) throw std::invalid_argument("negative edge distance");
    auto key = std::minmax(e.i, e.j);
    if (!seen.insert(key).second)
      throw std::invalid_argument("duplicate edge (" + std::to_string(e.i) +
                                  "," + std::to_string(e.j) + ")");
  }
  return EdgeListInput{n, std::move(edges)};
}

EdgeListInput load_edge_list_csv(const std::string& path, Index n_hint) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open edge file: " + path);
  std::vector<EdgeListInput::Edge> edges;
  std::set<std::pair<Index, Index>> seen;
  Index max_index = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto row = parse_numeric_row(line, lineno);
    if (row.size() != 3)
      throw IngestError("line " + std::to_string(lineno) +
                        ": expected 'i,j,dist'");
    const auto i = static_cast<Index>(row[0]);
    const auto j = static_cast<Index>(row[1]);
    if (i < 0 || j < 0 || row[0] != i || row[1] != j)
      throw IngestError("line " + std::to_string(lineno) + ": bad index");
    if (i == j)
      throw IngestError("line " + std::to_string(lineno) + ": self-edge");
    if (row[2] < 0.0)
      throw IngestError("line " + std::to_string(lineno) +
                        ": negative distance");
    if (!seen.insert(std::minmax(i, j)).second)
      throw IngestError("line " + std::to_string(lineno) + ": duplicate pair");
    edges.push_back({i, j, row[2]});
    max_index = std::max({max_index, i, j});
  }
  if (edges.empty()) throw IngestError("edge file is empty");
  const Index n = std::max(n_hint, max_index + 1);
  return EdgeListInput{n, std::move(edges)};
}

std::vector<std::pair<Index, int>> load_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open labels file: " + path);
  std::vector<std::pair<Index, int>> labels;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto row = parse_numeric_row(line, lineno);
    if (row.size() != 2)
      throw IngestError("line " + std::to_string(lineno) +
                        ": expected 'index,label'");
    const auto idx = static_cast<Index>(row[0]);
    const int lab = static_cast<int>(row[1]);
    if (row[0] != idx || idx < 0)
      throw IngestError("line " + std::to_string(lineno) + ": bad index");
    if (lab != 1 && lab != -1)
      throw IngestError("line " + std::to_string(lineno) +
                        ": label must be +1 or -1");
    labels.emplace_back(idx, lab);
  }
  return labels;
}

namespace {

// Uniform grid over the first (at most) 3 coordinates. Pruning by a
// coordinate projection cannot miss a true neighbor, so results stay exact.
class GridIndex {
 public:
  GridIndex(const Matrix& pts, double cell) : pts_(pts), cell_(cell) {
    gd_ = static_cast<int>(std::min<Index>(pts.cols(), 3));
    for (Index i = 0; i < pts.rows(); ++i) cells_[key(pts.row(i))].push_back(i);
  }

  template <typename F>
  void for_candidates(Index i, F&& f) const {
    const auto base = coords(pts_.row(i));
    std::array<long, 3> c = base;
    const int span = 1;
    for (long dx = -span; dx <= span; ++dx) {
      c[0] = base[0] + dx;
      for (long dy = (gd_ > 1 ? -span : 0); dy <= (gd_ > 1 ? span : 0); ++dy) {
        c[1] = base[1] + dy;
        for (long dz = (gd_ > 2 ? -span : 0); dz <= (gd_ > 2 ? span : 0);
             ++dz) {
          c[2] = base[2] + dz;
          auto it = cells_.find(pack(c));
          if (it == cells_.end()) continue;
          for (Index j : it->second) f(j);
        }
      }
    }
  }

 private:
  std::array<long, 3> coords(const Eigen::RowVectorXd& p) const {
    std::array<long, 3> c{0, 0, 0};
    for (int a = 0; a < gd_; ++a)
      c[static_cast<std::size_t>(a)] =
          static_cast<long>(std::floor(p[a] / cell_));
    return c;
  }

  std::uint64_t key(const Eigen::RowVectorXd& p) const {
    return pack(coords(p));
  }

  static std::uint64_t pack(const std::array<long, 3>& c) {
    std::uint64_t h = 1469598103934665603ull;
    for (long v : c) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }

  const Matrix& pts_;
  double cell_;
  int gd_;
  std::unordered_map<std::uint64_t, std::vector<Index>> cells_;
};

}  // namespace

NeighborLists neighbors_within(const PointCloud& cloud, double h) {
  if (h <= 0.0) throw std::invalid_argument("neighbors_within: h must be > 0");
  const Index n = cloud.n();
  NeighborLists out;
  out.lists.resize(static_cast<std::size_t>(n));
  const double h2 = h * h;
  GridIndex grid(cloud.points, h);
  for (Index i = 0; i < n; ++i) {
    auto& li = out.lists[static_cast<std::size_t>(i)];
    grid.for_candidates(i, [&](Index j) {
      if (j <= i) return;
      const double d2 = (cloud.points.row(i) - cloud.points.row(j)).squaredNorm();
      if (d2 < h2) {
        const double d = std::sqrt(d2);
        li.push_back({j, d});
        out.lists[static_cast<std::size_t>(j)].push_back({i, d});
      }
    });
  }
  for (auto& l : out.lists)
    std::sort(l.begin(), l.end(),
              [](const auto& a, const auto& b) { return a.index < b.index; });
  return out;
}

NeighborLists knn(const PointCloud& cloud, Index k) {
  const Index n = cloud.n();
  if (k < 1 || k >= n)
    throw std::invalid_argument("knn: require 1 <= k < n");
  // Directed k-NN per node (ties by lower index), then symmetrize.
  std::vector<std::vector<NeighborLists::Neighbor>> directed(
      static_cast<std::size_t>(n));
  Vector delta(n);
  std::vector<std::pair<double, Index>> cand(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      cand[c++] = {(cloud.points.row(i) - cloud.points.row(j)).norm(), j};
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    auto& li = directed[static_cast<std::size_t>(i)];
    li.reserve(static_cast<std::size_t>(k));
    for (Index a = 0; a < k; ++a) li.push_back({cand[a].second, cand[a].first});
    delta[i] = cand[static_cast<std::size_t>(k - 1)].first;
  }
  NeighborLists out;
  out.lists.resize(static_cast<std::size_t>(n));
  std::vector<std::map<Index, double>> merged(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    for (const auto& nb : directed[static_cast<std::size_t>(i)]) {
      merged[static_cast<std::size_t>(i)].emplace(nb.index, nb.dist);
      merged[static_cast<std::size_t>(nb.index)].emplace(i, nb.dist);
    }
  for (Index i = 0; i < n; ++i) {
    auto& li = out.lists[static_cast<std::size_t>(i)];
    for (const auto& [j, d] : merged[static_cast<std::size_t>(i)])
      li.push_back({j, d});
  }
  out.knn_delta = std::move(delta);
  return out;
}

}  // namespace graphfield
