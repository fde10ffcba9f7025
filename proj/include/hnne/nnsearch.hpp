#pragma once

#include <cstdint>
#include <vector>

#include "hnne/matrix.hpp"

namespace hnne {

// k nearest neighbors per row, self excluded, columns sorted ascending by
// (distance, index). Distances are Euclidean (not squared).
struct NeighborList {
  IntMatrix indices;  // n x k
  Matrix distances;   // n x k
};

enum class NNBackend { Auto, Exact, Approx };

// Auto switches to the approximate backend above this many rows.
inline constexpr int kExactBackendLimit = 20000;

// Brute force. Ties broken toward the smaller index. Exact for every input.
NeighborList knn_exact(const Matrix& points, int k);

// Neighbor-descent, seeded and synchronous: every round reads only the
// previous round's lists, so results are bitwise reproducible and independent
// of the thread count. Falls back to brute force when n is small.
NeighborList knn_approx(const Matrix& points, int k, std::uint64_t seed = 0);

NeighborList knn(const Matrix& points, int k, NNBackend backend = NNBackend::Auto,
                 std::uint64_t seed = 0);

// Index of the nearest row of base for every row of queries (exact, ties to
// the smaller index). base and queries must share a column count.
std::vector<int> nearest_index(const Matrix& base, const Matrix& queries);

}  // namespace hnne
