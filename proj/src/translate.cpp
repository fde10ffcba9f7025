#include "hnne/translate.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <string>

#include "hnne/parallel.hpp"

namespace hnne {

namespace {

std::vector<std::vector<int>> group_members(const Partition& p) {
  std::vector<std::vector<int>> members(p.groups);
  for (int i = 0; i < static_cast<int>(p.labels.size()); ++i) members[p.labels[i]].push_back(i);
  return members;
}

// 2x2 linear part for an anisotropic map: R(-angle) * diag(1, aspect) * R(angle).
Eigen::Matrix2d aniso_linear(double aspect, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix2d rot;
  rot << c, s, -s, c;
  Eigen::Matrix2d diag = Eigen::Matrix2d::Identity();
  diag(1, 1) = aspect;
  return rot.transpose() * diag * rot;
}

}  // namespace

Eigen::RowVectorXd ClusterAffine::apply(const Eigen::RowVectorXd& x) const {
  if (aspect == 1.0 && rotation_angle == 0.0) return scale * x + translation.transpose();
  // Anisotropic maps exist only in 2-d.
  const Eigen::Matrix2d lin = scale * aniso_linear(aspect, rotation_angle);
  return (lin * x.transpose()).transpose() + translation.transpose();
}

std::vector<double> nn_radii(const Matrix& level_points, NNBackend backend, std::uint64_t seed) {
  const NNGraph g = build_1nng(level_points, backend, seed);
  return g.nn_distance;
}

std::pair<Matrix, std::vector<ClusterAffine>> place_children(const Matrix& parent_pos,
                                                             const std::vector<double>& parent_radii,
                                                             const Partition& assignment,
                                                             const Matrix& child_prelim,
                                                             const TranslateParams& params) {
  const int g = static_cast<int>(parent_pos.rows());
  const int m = static_cast<int>(child_prelim.rows());
  const int d = static_cast<int>(parent_pos.cols());
  if (child_prelim.cols() != d)
    throw InvalidArgument("place_children: parent and child dimension mismatch");
  if (static_cast<int>(assignment.labels.size()) != m)
    throw InvalidArgument("place_children: assignment size does not match child count");
  if (static_cast<int>(parent_radii.size()) != g)
    throw InvalidArgument("place_children: radii size does not match parent count");
  for (int i = 0; i < m; ++i)
    if (assignment.labels[i] < 0 || assignment.labels[i] >= g)
      throw InvalidArgument("place_children: assignment label out of range at row " + std::to_string(i));
  for (double r : parent_radii)
    if (!(r >= 0.0)) throw InvalidArgument("place_children: radii must be non-negative and finite");
  if (!(params.radius_fraction > 0.0) || !(params.shrink > 0.0))
    throw InvalidArgument("place_children: radius_fraction and shrink must be positive");

  const auto members = group_members(Partition{assignment.labels, g});
  Matrix placed(m, d);
  std::vector<ClusterAffine> affines(g);

  parallel_chunks(g, 8, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t p = b; p < e; ++p) {
      auto& aff = affines[p];
      aff.translation = Vector::Zero(d);
      const auto& kids = members[p];
      if (kids.empty()) continue;
      if (kids.size() == 1) {
        placed.row(kids[0]) = parent_pos.row(p);
        aff.scale = 1.0;
        aff.translation = (parent_pos.row(p) - child_prelim.row(kids[0])).transpose();
        continue;
      }
      Eigen::RowVectorXd center = Eigen::RowVectorXd::Zero(d);
      for (int i : kids) center += child_prelim.row(i);
      center /= static_cast<double>(kids.size());
      double max_dist = 0.0;
      for (int i : kids) max_dist = std::max(max_dist, (child_prelim.row(i) - center).norm());
      const double target = params.shrink * params.radius_fraction * parent_radii[p];
      if (max_dist == 0.0) {
        // All children coincide: drop them on the parent.
        for (int i : kids) placed.row(i) = parent_pos.row(p);
        aff.scale = 1.0;
        aff.translation = (parent_pos.row(p) - child_prelim.row(kids[0])).transpose();
        continue;
      }
      const double s = target / max_dist;
      for (int i : kids) placed.row(i) = parent_pos.row(p) + s * (child_prelim.row(i) - center);
      aff.scale = s;
      aff.translation = (parent_pos.row(p) - s * center).transpose();
    }
  });
  return {std::move(placed), std::move(affines)};
}

TranslateResult translate_down(const Hierarchy& h, const std::vector<Matrix>& prelim_levels,
                               const Matrix& prelim_points, const TranslateParams& params) {
  TranslateResult res;
  const int nlevels = static_cast<int>(h.levels.size());
  if (static_cast<int>(prelim_levels.size()) != nlevels)
    throw InvalidArgument("translate_down: prelim level count does not match hierarchy");
  if (nlevels == 0) {
    res.embedding = prelim_points;
    return res;
  }
  res.placed_levels.resize(nlevels);
  res.level_radii.resize(nlevels);
  res.level_affines.resize(nlevels);

  res.placed_levels[nlevels - 1] = prelim_levels[nlevels - 1];
  for (int k = nlevels - 1; k >= 0; --k) {
    std::vector<double> radii = nn_radii(res.placed_levels[k], params.backend, params.seed);
    double min_pos = std::numeric_limits<double>::infinity();
    for (double r : radii)
      if (r > 0.0) min_pos = std::min(min_pos, r);
    const double fallback = std::isfinite(min_pos) ? min_pos * 1e-3 : 1.0;
    for (double& r : radii)
      if (r == 0.0) r = fallback;
    res.level_radii[k] = radii;

    const Matrix& child_prelim = k > 0 ? prelim_levels[k - 1] : prelim_points;
    const Partition& assignment = k > 0 ? h.levels[k].parent_of_child : h.base_partition;
    auto [placed, affines] = place_children(res.placed_levels[k], radii, assignment, child_prelim, params);
    res.level_affines[k] = std::move(affines);
    if (k > 0)
      res.placed_levels[k - 1] = std::move(placed);
    else
      res.embedding = std::move(placed);
  }
  return res;
}

void inflate(Matrix& coords, const Partition& clusters, const Matrix& anchors,
             std::vector<ClusterAffine>* affines, double target_ratio) {
  if (coords.cols() != 2) {
    std::cerr << "hnne: warning: inflation is defined for 2-d embeddings only; skipping\n";
    return;
  }
  if (static_cast<int>(clusters.labels.size()) != coords.rows())
    throw InvalidArgument("inflate: partition size does not match coordinate count");
  if (anchors.rows() != clusters.groups || anchors.cols() != 2)
    throw InvalidArgument("inflate: anchors must be one 2-d row per cluster");
  if (affines && static_cast<int>(affines->size()) != clusters.groups)
    throw InvalidArgument("inflate: affine count does not match cluster count");
  if (!(target_ratio >= 1.0)) throw InvalidArgument("inflate: target_ratio must be >= 1");

  const auto members = group_members(clusters);
  parallel_chunks(clusters.groups, 8, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t g = b; g < e; ++g) {
      const auto& pts = members[g];
      if (pts.size() < 3) continue;

      Eigen::RowVector2d mu = Eigen::RowVector2d::Zero();
      for (int i : pts) mu += coords.row(i);
      mu /= static_cast<double>(pts.size());

      // Probe the six candidate frames for the most squeezed one.
      double best_ratio = 0.0, best_angle = 0.0;
      bool best_minor_is_y = true;
      for (int j = 0; j < 6; ++j) {
        const double theta = j * std::numbers::pi / 10.0;
        const double c = std::cos(theta), s = std::sin(theta);
        double vx = 0.0, vy = 0.0;
        for (int i : pts) {
          const double x = coords(i, 0) - mu(0), y = coords(i, 1) - mu(1);
          const double rx = c * x + s * y;
          const double ry = -s * x + c * y;
          vx += rx * rx;
          vy += ry * ry;
        }
        const double hi = std::max(vx, vy), lo = std::min(vx, vy);
        if (lo <= hi * 1e-18) continue;  // collinear frame: nothing multiplicative can widen it
        const double ratio = std::sqrt(hi / lo);
        if (ratio > best_ratio) {
          best_ratio = ratio;
          best_angle = theta;
          best_minor_is_y = vy <= vx;
        }
      }
      if (best_ratio <= target_ratio) continue;

      const double kappa = best_ratio / target_ratio;
      // Canonical form keeps the scaled axis second: a minor x-axis in the
      // theta frame is a minor y-axis in the theta + pi/2 frame.
      const double angle = best_minor_is_y ? best_angle : best_angle + std::numbers::pi / 2.0;
      const Eigen::Matrix2d lin = aniso_linear(kappa, angle);

      const Eigen::RowVector2d anchor = anchors.row(g);
      double r_before = 0.0;
      for (int i : pts) r_before = std::max(r_before, (coords.row(i) - anchor).norm());
      for (int i : pts)
        coords.row(i) = (lin * (coords.row(i) - mu).transpose()).transpose() + mu;
      double r_after = 0.0;
      for (int i : pts) r_after = std::max(r_after, (coords.row(i) - anchor).norm());
      double cap = 1.0;
      if (r_after > r_before && r_after > 0.0) {
        cap = r_before / r_after;
        for (int i : pts) coords.row(i) = anchor + cap * (coords.row(i) - anchor);
      }

      if (affines) {
        // Total update applied after the existing map F (a pure similarity):
        // x -> anchor + cap * (Inf(F(x)) - anchor) with Inf(y) = lin*(y-mu)+mu.
        auto& aff = (*affines)[g];
        if (aff.aspect != 1.0 || aff.rotation_angle != 0.0)
          throw InvalidArgument("inflate: affine for cluster " + std::to_string(g) +
                                " is already anisotropic");
        const Eigen::Vector2d t_old = aff.translation;
        const Eigen::Vector2d mu_v = mu.transpose();
        const Eigen::Vector2d a_v = anchor.transpose();
        aff.translation = cap * (lin * (t_old - mu_v) + mu_v - a_v) + a_v;
        aff.scale = cap * aff.scale;
        aff.aspect = kappa;
        aff.rotation_angle = angle;
      }
    }
  });
}

}  // namespace hnne
