#include "hnne/hierarchy.hpp"

#include <numeric>
#include <string>

#include "hnne/parallel.hpp"

namespace hnne {

namespace {

// Union-find with path halving.
struct DisjointSets {
  std::vector<int> parent;

  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

// Member row indices per group, each list ascending.
std::vector<std::vector<int>> group_members(const Partition& p) {
  std::vector<std::vector<int>> members(p.groups);
  for (int i = 0; i < static_cast<int>(p.labels.size()); ++i) members[p.labels[i]].push_back(i);
  return members;
}

}  // namespace

std::vector<int> Hierarchy::level_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(levels.size());
  for (const auto& l : levels) sizes.push_back(static_cast<int>(l.centroids.rows()));
  return sizes;
}

NNGraph build_1nng(const Matrix& points, NNBackend backend, std::uint64_t seed) {
  const NeighborList nl = knn(points, 1, backend, seed);
  NNGraph g;
  g.nn_index.assign(nl.indices.data(), nl.indices.data() + nl.indices.rows());
  g.nn_distance.assign(nl.distances.data(), nl.distances.data() + nl.distances.rows());
  return g;
}

Partition connected_components(const NNGraph& graph) {
  const int n = static_cast<int>(graph.nn_index.size());
  if (n == 0) throw InvalidArgument("connected_components: empty graph");
  DisjointSets sets(n);
  for (int i = 0; i < n; ++i) {
    const int j = graph.nn_index[i];
    if (j < 0 || j >= n || j == i) throw InvalidArgument("connected_components: malformed edge at node " + std::to_string(i));
    sets.unite(i, j);
  }
  Partition p;
  p.labels.resize(n);
  std::vector<int> relabel(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int root = sets.find(i);
    if (relabel[root] < 0) relabel[root] = next++;
    p.labels[i] = relabel[root];
  }
  p.groups = next;
  return p;
}

Matrix component_centroids(const Matrix& points, const Partition& partition) {
  const int n = static_cast<int>(points.rows());
  if (static_cast<int>(partition.labels.size()) != n)
    throw InvalidArgument("component_centroids: partition size does not match point count");
  if (partition.groups < 1) throw InvalidArgument("component_centroids: no groups");
  for (int i = 0; i < n; ++i)
    if (partition.labels[i] < 0 || partition.labels[i] >= partition.groups)
      throw InvalidArgument("component_centroids: label out of range at row " + std::to_string(i));

  const auto members = group_members(partition);
  for (int g = 0; g < partition.groups; ++g)
    if (members[g].size() < 2)
      throw InvalidArgument("component_centroids: group " + std::to_string(g) +
                            " has fewer than 2 members; not a 1-NN component partition");

  Matrix centroids(partition.groups, points.cols());
  parallel_chunks(partition.groups, 16, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t g = b; g < e; ++g) {
      Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(points.cols());
      for (int i : members[g]) sum += points.row(i);
      centroids.row(g) = sum / static_cast<double>(members[g].size());
    }
  });
  return centroids;
}

Hierarchy build_hierarchy(const Matrix& points, NNBackend backend, std::uint64_t seed) {
  if (points.rows() < 2) throw InvalidArgument("build_hierarchy: need at least 2 points");
  Hierarchy h;
  Matrix current;
  bool first = true;
  for (;;) {
    const Matrix& level_points = first ? points : current;
    const NNGraph graph = build_1nng(level_points, backend, seed);
    const Partition part = connected_components(graph);
    if (first) h.base_partition = part;
    if (part.groups < 3) {
      // Never emit a level with fewer than 3 centroids; with < 3 groups at
      // the first step the hierarchy is just the base partition over X.
      break;
    }
    HierarchyLevel level;
    level.parent_of_child = part;
    level.centroids = component_centroids(level_points, part);
    current = level.centroids;
    h.levels.push_back(std::move(level));
    first = false;
    if (current.rows() < 4) break;  // next level would have at most 2 groups
  }
  return h;
}

Partition partition_at_level(const Hierarchy& h, int level) {
  if (h.levels.empty()) {
    if (level != 0)
      throw InvalidArgument("partition_at_level: hierarchy has no centroid levels; only level 0 exists");
    return h.base_partition;
  }
  if (level < 0 || level > h.top())
    throw InvalidArgument("partition_at_level: level " + std::to_string(level) + " out of range [0, " +
                          std::to_string(h.top()) + "]");
  Partition p = h.base_partition;
  for (int k = 1; k <= level; ++k) {
    const auto& up = h.levels[k].parent_of_child.labels;
    for (auto& lab : p.labels) lab = up[lab];
  }
  p.groups = static_cast<int>(h.levels[level].centroids.rows());
  return p;
}

}  // namespace hnne
