#pragma once

#include "graphfield/types.hpp"

#include <string>
#include <vector>

namespace graphfield {

enum class Manifold { Circle, Sphere, Abstract };

/// Immutable point cloud: n points as rows of an n x d matrix.
/// Circle/Sphere tags assert unit-norm rows in R^2 / R^3.
struct PointCloud {
  Matrix points;  // n x d
  Manifold manifold = Manifold::Abstract;

  Index n() const { return points.rows(); }
  Index d() const { return points.cols(); }
};

/// Validates invariants and returns the cloud; throws invalid_argument.
PointCloud make_cloud(Matrix points, Manifold manifold = Manifold::Abstract);

/// Pairwise-distance input for graphs over abstract nodes, one record per
/// unordered pair.
struct EdgeListInput {
  struct Edge {
    Index i, j;
    double dist;
  };
  Index n = 0;
  std::vector<Edge> edges;
};

EdgeListInput make_edge_list(Index n, std::vector<EdgeListInput::Edge> edges);

/// Symmetrized adjacency with distances; knn() also records delta[i],
/// the distance to the k-th nearest neighbor of node i.
struct NeighborLists {
  struct Neighbor {
    Index index;
    double dist;
  };
  std::vector<std::vector<Neighbor>> lists;
  Vector knn_delta;  // empty unless produced by knn()

  Index n() const { return static_cast<Index>(lists.size()); }
};

/// n uniform points on the unit circle, deterministic per seed.
PointCloud sample_circle(Index n, std::uint64_t seed);

/// n uniform points on the unit sphere (normalized 3-d Gaussians).
PointCloud sample_sphere(Index n, std::uint64_t seed);

/// CSV ingestion: one point per row, numeric columns. Row order preserved.
PointCloud load_points_csv(const std::string& path,
                           Manifold manifold = Manifold::Abstract);

/// Header-free "i,j,dist" rows with 0-based indices; n inferred as
/// max index + 1 unless n_hint is larger.
EdgeListInput load_edge_list_csv(const std::string& path, Index n_hint = 0);

/// Labels file "index,label" with labels in {-1,+1}.
std::vector<std::pair<Index, int>> load_labels_csv(const std::string& path);

/// All pairs with |x_i - x_j| < h (strict). Exact; grid-accelerated.
NeighborLists neighbors_within(const PointCloud& cloud, double h);

/// Symmetrized k-nearest-neighbor lists, ties broken by lower index.
NeighborLists knn(const PointCloud& cloud, Index k);

}  // namespace graphfield
