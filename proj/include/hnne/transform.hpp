#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hnne/hierarchy.hpp"
#include "hnne/linproj.hpp"
#include "hnne/matrix.hpp"
#include "hnne/translate.hpp"

namespace hnne {

struct FitParams {
  int dim = 2;
  InitMode init = InitMode::PcaCentroids;
  int pca_threshold = 1000;
  double radius_fraction = 1.0 / 3.0;
  // 0 resolves to 1 for dim <= 3 and 3/5 above (or with guarantee on).
  double shrink = 0.0;
  // Caps shrink at 3/5 and enforces radius_fraction * shrink <= 1/5, the
  // regime in which every descendant provably stays inside its ancestor's
  // containment ball.
  bool guarantee = false;
  bool inflate = false;
  // Centroid level whose clusters drive out-of-sample lookup; -1 picks level
  // 1 when it exists, else level 0.
  int lookup_level = -1;
  NNBackend backend = NNBackend::Auto;
  std::uint64_t seed = 0;
};

// Everything needed to project unseen points: the linear preliminary map,
// the lookup centroids in the original space, and one composed affine per
// lookup cluster that replays that cluster's chain of placements.
struct ProjectionModel {
  LinearMap linear;
  Matrix lookup_centroids;  // g x input_dim
  std::vector<ClusterAffine> affines;
  int lookup_level = 0;
  double radius_fraction = 1.0 / 3.0;
  double shrink = 1.0;
  bool inflated = false;
};

struct FitResult {
  Matrix embedding;
  ProjectionModel model;
  Hierarchy hierarchy;
  // Placed centroid coordinates and effective radii per level; embedding has
  // been moved out of this member.
  TranslateResult translation;
  double resolved_shrink = 1.0;
  int pca_level = kPcaLevelData;  // centroid level the projection was fitted on
};

FitResult fit(const Matrix& points, const FitParams& params = {});

// Projects unseen rows with the fitted model: preliminary linear projection,
// nearest lookup centroid in the original space, then that cluster's affine.
Matrix transform(const ProjectionModel& model, const Matrix& points);

void save_model(const ProjectionModel& model, const std::string& path);
ProjectionModel load_model(const std::string& path);

}  // namespace hnne
