#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hnne/hierarchy.hpp"
#include "hnne/matrix.hpp"
#include "hnne/nnsearch.hpp"

namespace hnne {

struct TranslateParams {
  double radius_fraction = 1.0 / 3.0;
  double shrink = 1.0;
  NNBackend backend = NNBackend::Auto;
  std::uint64_t seed = 0;
};

// Affine map y = L x + t with L = scale * R(-angle) * diag(1, aspect) * R(angle).
// Similarities keep aspect = 1, angle = 0; only 2-d inflation populates the
// anisotropic part. In dimensions other than 2 the map is always a pure
// scaling plus translation.
struct ClusterAffine {
  Vector translation;
  double scale = 1.0;
  double aspect = 1.0;
  double rotation_angle = 0.0;

  Eigen::RowVectorXd apply(const Eigen::RowVectorXd& x) const;
};

// Distance from each row to its nearest other row.
std::vector<double> nn_radii(const Matrix& level_points, NNBackend backend = NNBackend::Auto,
                             std::uint64_t seed = 0);

// Moves each parent's children as one rigid group (uniform scale + shift)
// from their preliminary coordinates into the ball of radius
// shrink * radius_fraction * parent_radii[p] around parent_pos.row(p); the
// farthest child lands exactly on that ball's boundary. Returns the placed
// coordinates and the per-parent similarity that realizes them.
std::pair<Matrix, std::vector<ClusterAffine>> place_children(const Matrix& parent_pos,
                                                             const std::vector<double>& parent_radii,
                                                             const Partition& assignment,
                                                             const Matrix& child_prelim,
                                                             const TranslateParams& params);

struct TranslateResult {
  Matrix embedding;                                       // final point coordinates
  std::vector<Matrix> placed_levels;                      // placed centroid coords per level
  std::vector<std::vector<double>> level_radii;           // effective 1-NN radii per level
  std::vector<std::vector<ClusterAffine>> level_affines;  // per level: one map per parent
};

// Top-down pass: the top level keeps its preliminary coordinates, every
// level below is placed by place_children with radii measured on the placed
// coordinates of its parents. Zero radii (duplicate centroids) are replaced
// by min-positive-radius * 1e-3 so placement never collapses; the stored
// radii are these effective values.
TranslateResult translate_down(const Hierarchy& h, const std::vector<Matrix>& prelim_levels,
                               const Matrix& prelim_points, const TranslateParams& params);

// Widens squeezed 2-d clusters: for each cluster, the axis frame (out of
// rotations j*pi/10, j = 0..5) with the largest axis-variance ratio is found
// and, when that ratio exceeds target_ratio, the minor axis is scaled up to
// meet it. The cluster is then rescaled about anchors.row(cluster) if its
// extent from that anchor grew, so containment balls stay valid. coords is
// updated in place; when affines is non-null each cluster's map is composed
// onto the matching entry. No-op (with a warning) unless coords has 2 columns.
void inflate(Matrix& coords, const Partition& clusters, const Matrix& anchors,
             std::vector<ClusterAffine>* affines, double target_ratio = 2.0);

}  // namespace hnne
