#pragma once

#include <cstdint>
#include <vector>

#include "hnne/matrix.hpp"
#include "hnne/nnsearch.hpp"

namespace hnne {

// Directed 1-nearest-neighbor graph: edge i -> nn_index[i].
struct NNGraph {
  std::vector<int> nn_index;
  std::vector<double> nn_distance;
};

// Group labels in [0, groups), numbered by first appearance.
struct Partition {
  std::vector<int> labels;
  int groups = 0;
};

// One centroid level. parent_of_child maps the rows of the level below
// (or the data points, for level 0) onto this level's rows.
struct HierarchyLevel {
  Matrix centroids;
  Partition parent_of_child;
};

// Recursive 1-NN-graph agglomeration. levels[0] sits directly above the data
// (its parent_of_child equals base_partition); each further level groups the
// centroids of the one below. levels is empty when the data collapses to
// fewer than 3 groups at the first step.
struct Hierarchy {
  Partition base_partition;
  std::vector<HierarchyLevel> levels;

  int top() const { return static_cast<int>(levels.size()) - 1; }
  std::vector<int> level_sizes() const;
};

NNGraph build_1nng(const Matrix& points, NNBackend backend = NNBackend::Auto, std::uint64_t seed = 0);

// Weakly connected components of the (undirected view of the) graph; every
// component of a 1-NN graph has at least 2 members.
Partition connected_components(const NNGraph& graph);

// Mean of each group's members. Every group must be non-empty with >= 2
// members (singletons cannot arise from 1-NN components and are flagged).
Matrix component_centroids(const Matrix& points, const Partition& partition);

// Builds levels until the next one would have fewer than 3 groups or the
// current one has fewer than 4 points.
Hierarchy build_hierarchy(const Matrix& points, NNBackend backend = NNBackend::Auto,
                          std::uint64_t seed = 0);

// Labels of the original data points at the given centroid level (level 0 =
// base partition composed with nothing further).
Partition partition_at_level(const Hierarchy& h, int level);

}  // namespace hnne
