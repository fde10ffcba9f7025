#include "hnne/linproj.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "hnne/parallel.hpp"
#include "hnne/rng.hpp"

namespace hnne {

namespace {

// Flip columns so the entry of largest magnitude is positive: eigensolvers
// return eigenvectors up to sign, and downstream results should not depend
// on that accident.
void canonicalize_signs(Matrix& basis) {
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < basis.rows(); ++r) {
      const double a = std::abs(basis(r, c));
      if (a > best) {
        best = a;
        arg = r;
      }
    }
    if (basis(arg, c) < 0) basis.col(c) = -basis.col(c);
  }
}

// First axis vector not already spanned by the existing columns; used to
// complete a rank-deficient basis deterministically.
Eigen::VectorXd complete_direction(const Matrix& basis, int used_cols) {
  const Eigen::Index dim = basis.rows();
  for (Eigen::Index a = 0; a < dim; ++a) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v(a) = 1.0;
    for (int c = 0; c < used_cols; ++c) v -= basis.col(c).dot(v) * basis.col(c);
    const double nrm = v.norm();
    if (nrm > 1e-8) return v / nrm;
  }
  throw InvalidData("fit_linear: unable to complete an orthonormal basis");
}

Matrix pca_basis(const Matrix& points, int d) {
  const Eigen::Index n = points.rows();
  const Eigen::Index dim = points.cols();
  const Eigen::RowVectorXd mean = points.colwise().mean();

  Matrix basis(dim, d);
  // Centered data never materialized at full size for the covariance route;
  // the Gram route (n < dim) needs it but is then the smaller of the two.
  if (n < dim) {
    Matrix centered = points.rowwise() - mean;
    if (centered.squaredNorm() == 0.0) {
      std::cerr << "hnne: warning: zero-variance input, falling back to axis-aligned projection\n";
      basis.setZero();
      for (int c = 0; c < d; ++c) basis(c, c) = 1.0;
      return basis;
    }
    const Matrix gram = centered * centered.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw InvalidData("fit_linear: eigendecomposition failed");
    const auto& values = solver.eigenvalues();  // ascending
    const double scale = std::max(values(n - 1), 0.0);
    int used = 0;
    for (int c = 0; c < d; ++c) {
      const Eigen::Index src = n - 1 - c;
      const double mu = values(src);
      if (mu <= scale * 1e-12 || mu <= 0.0) break;
      basis.col(c) = (centered.transpose() * solver.eigenvectors().col(src)) / std::sqrt(mu);
      basis.col(c).normalize();
      ++used;
    }
    for (int c = used; c < d; ++c) basis.col(c) = complete_direction(basis, c);
  } else {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::RowVectorXd sum_check = Eigen::RowVectorXd::Zero(dim);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::RowVectorXd r = points.row(i) - mean;
      cov.selfadjointView<Eigen::Lower>().rankUpdate(r.transpose());
      sum_check += r.cwiseAbs();
    }
    cov /= static_cast<double>(n - 1);
    if (sum_check.sum() == 0.0) {
      std::cerr << "hnne: warning: zero-variance input, falling back to axis-aligned projection\n";
      basis.setZero();
      for (int c = 0; c < d; ++c) basis(c, c) = 1.0;
      return basis;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov.selfadjointView<Eigen::Lower>());
    if (solver.info() != Eigen::Success) throw InvalidData("fit_linear: eigendecomposition failed");
    const auto& values = solver.eigenvalues();
    const double scale = std::max(values(dim - 1), 0.0);
    int used = 0;
    for (int c = 0; c < d; ++c) {
      const Eigen::Index src = dim - 1 - c;
      if (values(src) <= scale * 1e-12 || values(src) <= 0.0) break;
      basis.col(c) = solver.eigenvectors().col(src);
      ++used;
    }
    for (int c = used; c < d; ++c) basis.col(c) = complete_direction(basis, c);
  }
  canonicalize_signs(basis);
  return basis;
}

}  // namespace

int select_pca_level(const Hierarchy& h, int threshold) {
  if (threshold < 1) throw InvalidArgument("select_pca_level: threshold must be >= 1");
  const int n = static_cast<int>(h.base_partition.labels.size());
  if (h.levels.empty()) return kPcaLevelData;
  int last_big = -1;
  for (int k = 0; k <= h.top(); ++k)
    if (h.levels[k].centroids.rows() >= threshold) last_big = k;
  if (last_big >= 0) return last_big;
  return n < threshold ? kPcaLevelData : 0;
}

LinearMap fit_linear(const Matrix& points, int d, InitMode mode, std::uint64_t seed) {
  if (d < 1) throw InvalidArgument("fit_linear: output dimension must be >= 1");
  if (points.rows() < 1) throw InvalidArgument("fit_linear: empty input");
  require_finite(points, "fit_linear input");
  const Eigen::Index n = points.rows();
  const Eigen::Index dim = points.cols();

  LinearMap map;
  map.mode = mode;
  map.input_dim = static_cast<int>(dim);
  map.output_dim = d;
  map.seed = seed;

  switch (mode) {
    case InitMode::PcaCentroids:
    case InitMode::PcaFull: {
      if (d > std::min<Eigen::Index>(n - 1, dim))
        throw InvalidArgument("fit_linear: d (" + std::to_string(d) + ") exceeds min(n-1, dim) = " +
                              std::to_string(std::min<Eigen::Index>(n - 1, dim)));
      map.mean = points.colwise().mean().transpose();
      map.basis = pca_basis(points, d);
      break;
    }
    case InitMode::RandomProjection: {
      if (d > dim)
        throw InvalidArgument("fit_linear: d (" + std::to_string(d) + ") exceeds input dimension " +
                              std::to_string(dim));
      map.mean = points.colwise().mean().transpose();
      map.basis.resize(dim, d);
      Rng rng(mix64(seed ^ 0x2545f4914f6cdd1dull));
      for (int c = 0; c < d; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) map.basis(r, c) = rng.next_gauss();
        map.basis.col(c).normalize();
      }
      break;
    }
    case InitMode::RandomPoints: {
      if (d > dim)
        throw InvalidArgument("fit_linear: d (" + std::to_string(d) + ") exceeds input dimension " +
                              std::to_string(dim));
      break;  // nothing to fit: apply_linear draws coordinates from the seed
    }
  }
  return map;
}

Matrix apply_linear(const LinearMap& map, const Matrix& points) {
  if (map.mode == InitMode::RandomPoints) {
    if (points.cols() != map.input_dim)
      throw InvalidArgument("apply_linear: input has " + std::to_string(points.cols()) +
                            " columns, map expects " + std::to_string(map.input_dim));
    const std::uint64_t base = mix64(map.seed ^ 0x7f4a7c159e3779b9ull);
    Matrix out(points.rows(), map.output_dim);
    parallel_chunks(points.rows(), 1024, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t i = b; i < e; ++i)
        for (int c = 0; c < map.output_dim; ++c) {
          const std::uint64_t word =
              mix64(base + static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(map.output_dim) + c);
          out(i, c) = static_cast<double>(word >> 11) * 0x1.0p-53;
        }
    });
    return out;
  }

  if (points.cols() != map.input_dim)
    throw InvalidArgument("apply_linear: input has " + std::to_string(points.cols()) +
                          " columns, map expects " + std::to_string(map.input_dim));
  require_finite(points, "apply_linear input");
  Matrix out(points.rows(), map.output_dim);
  // Blocked so the centered copy never exceeds a fixed footprint.
  parallel_chunks(points.rows(), 2048, [&](std::int64_t b, std::int64_t e) {
    out.middleRows(b, e - b).noalias() =
        (points.middleRows(b, e - b).rowwise() - map.mean.transpose()) * map.basis;
  });
  return out;
}

}  // namespace hnne
