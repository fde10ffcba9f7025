#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>

#include "hnne/error.hpp"

namespace hnne {

// Row-major throughout: a row is a point, and row blocks can be handed to
// worker threads without striding surprises.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (!std::isfinite(m(i, j)))
          throw InvalidData(std::string(what) + ": non-finite value at row " +
                            std::to_string(i) + ", column " + std::to_string(j));
  }
}

}  // namespace hnne
