#pragma once

#include <cstdint>

#include "hnne/hierarchy.hpp"
#include "hnne/matrix.hpp"

namespace hnne {

enum class InitMode { PcaCentroids, PcaFull, RandomProjection, RandomPoints };

// Fitted projection into d dimensions. For the PCA modes and random
// projections: y = (x - mean) * basis. RandomPoints ignores the input and
// draws seeded uniform coordinates, so it stores only the shape and seed.
struct LinearMap {
  InitMode mode = InitMode::PcaFull;
  int input_dim = 0;
  int output_dim = 0;
  Vector mean;   // size input_dim (empty for RandomPoints)
  Matrix basis;  // input_dim x output_dim (empty for RandomPoints)
  std::uint64_t seed = 0;
};

// Returned by select_pca_level when the sampling should use the data points
// themselves rather than a centroid level.
inline constexpr int kPcaLevelData = -1;

// Lowest centroid level whose every level above is smaller than threshold:
// the cheapest sample that still sees at least ~threshold points. Returns
// kPcaLevelData when every level is below threshold and the data itself is
// too (or when there are no centroid levels at all).
int select_pca_level(const Hierarchy& h, int threshold = 1000);

LinearMap fit_linear(const Matrix& points, int d, InitMode mode, std::uint64_t seed = 0);

Matrix apply_linear(const LinearMap& map, const Matrix& points);

}  // namespace hnne
