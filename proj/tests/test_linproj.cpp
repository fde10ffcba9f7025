#include <cmath>

#include "doctest.h"
#include "hnne/linproj.hpp"
#include "util.hpp"

using hnne::InitMode;
using hnne::Matrix;

namespace {

// Hierarchy skeleton with prescribed sizes; only shapes matter for level
// selection.
hnne::Hierarchy fake_hierarchy(int n, const std::vector<int>& level_sizes) {
    hnne::Hierarchy h;
    h.base_partition.labels.assign(n, 0);
    h.base_partition.groups = level_sizes.empty() ? 1 : level_sizes[0];
    for (int s : level_sizes) {
        hnne::HierarchyLevel lvl;
        lvl.centroids = Matrix::Zero(s, 1);
        lvl.parent_of_child.groups = s;
        h.levels.push_back(std::move(lvl));
    }
    return h;
}

// Reference PCA through a dense covariance eigendecomposition, independent
// of the library's two internal routes.
Matrix reference_pca_coords(const Matrix& x, int d) {
    Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
    Eigen::MatrixXd cov = (c.transpose() * c) / double(x.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::MatrixXd basis = es.eigenvectors().rightCols(d).rowwise().reverse();
    return c * basis;
}

}  // namespace

TEST_CASE("select_pca_level picks the smallest level still above the threshold") {
    auto h = fake_hierarchy(70000, {21000, 6400, 2000, 620, 195, 60});
    CHECK(hnne::select_pca_level(h, 1000) == 2);
    CHECK(hnne::select_pca_level(h, 5000) == 1);
    CHECK(hnne::select_pca_level(h, 50) == 5);
    CHECK(hnne::select_pca_level(h, 30000) == 0);  // no level qualifies, data is large
}

TEST_CASE("select_pca_level falls back to the data only when everything is small") {
    CHECK(hnne::select_pca_level(fake_hierarchy(800, {240, 70}), 1000) == hnne::kPcaLevelData);
    CHECK(hnne::select_pca_level(fake_hierarchy(800, {}), 1000) == hnne::kPcaLevelData);
    CHECK(hnne::select_pca_level(fake_hierarchy(5000, {1200}), 1000) == 0);
    CHECK(hnne::select_pca_level(fake_hierarchy(5000, {800}), 1000) == 0);
}

TEST_CASE("PCA recovers the dominant direction of a line with noise") {
    hnne::Rng rng(3);
    Matrix x(400, 2);
    for (int i = 0; i < 400; ++i) {
        double t = rng.next_gauss();
        x(i, 0) = t + 0.01 * rng.next_gauss();
        x(i, 1) = 2.0 * t + 0.01 * rng.next_gauss();
    }
    auto map = hnne::fit_linear(x, 1, InitMode::PcaFull, 0);
    REQUIRE(map.basis.rows() == 2);
    REQUIRE(map.basis.cols() == 1);
    double nx = map.basis(0, 0), ny = map.basis(1, 0);
    CHECK(std::abs(ny / nx - 2.0) < 0.05);            // direction ~ (1, 2)
    CHECK(std::abs(nx * nx + ny * ny - 1.0) < 1e-12);  // unit norm
    CHECK(std::abs(map.mean(0) - x.col(0).mean()) < 1e-12);
}

TEST_CASE("PCA orders components by variance and matches a dense reference") {
    Matrix x = testutil::random_gauss(300, 6, 17);
    x.col(0) *= 5.0;
    x.col(3) *= 3.0;
    auto map = hnne::fit_linear(x, 3, InitMode::PcaFull, 0);
    Matrix y = hnne::apply_linear(map, x);
    Matrix ref = reference_pca_coords(x, 3);
    for (int j = 0; j < 3; ++j) {
        double vy = y.col(j).squaredNorm();
        double vr = ref.col(j).squaredNorm();
        CHECK(std::abs(vy - vr) / vr < 1e-9);
        // Sign-insensitive column match.
        double dot = std::abs(y.col(j).dot(ref.col(j)));
        CHECK(std::abs(dot - ref.col(j).squaredNorm()) / ref.col(j).squaredNorm() < 1e-9);
    }
    double v0 = y.col(0).squaredNorm(), v1 = y.col(1).squaredNorm(), v2 = y.col(2).squaredNorm();
    CHECK(v0 >= v1);
    CHECK(v1 >= v2);
}

TEST_CASE("wide input takes the Gram route and matches the covariance route") {
    Matrix x = testutil::random_gauss(200, 300, 23);  // n < dim
    auto map = hnne::fit_linear(x, 2, InitMode::PcaFull, 0);
    Matrix y = hnne::apply_linear(map, x);
    Matrix ref = reference_pca_coords(x, 2);
    for (int j = 0; j < 2; ++j) {
        double scale = std::sqrt(ref.col(j).squaredNorm());
        double diff = std::min((y.col(j) - ref.col(j)).norm(), (y.col(j) + ref.col(j)).norm());
        CHECK(diff / scale < 1e-6);
    }
}

TEST_CASE("PCA requires enough rows and input columns") {
    Matrix x = testutil::random_gauss(5, 3, 1);
    CHECK_THROWS_AS(hnne::fit_linear(x, 4, InitMode::PcaFull, 0), hnne::InvalidArgument);   // d > dim
    Matrix tiny = testutil::random_gauss(3, 8, 1);
    CHECK_THROWS_AS(hnne::fit_linear(tiny, 3, InitMode::PcaFull, 0), hnne::InvalidArgument);  // d > n-1
    CHECK_NOTHROW(hnne::fit_linear(tiny, 2, InitMode::PcaFull, 0));
}

TEST_CASE("zero-variance input degrades to an axis projection") {
    Matrix x = Matrix::Constant(50, 4, 3.25);
    auto map = hnne::fit_linear(x, 2, InitMode::PcaFull, 0);
    Matrix y = hnne::apply_linear(map, x);
    CHECK(y.cwiseAbs().maxCoeff() == 0.0);
    // Basis falls back to the leading coordinate axes.
    CHECK(map.basis(0, 0) == 1.0);
    CHECK(map.basis(1, 1) == 1.0);
    CHECK(map.basis.col(0).norm() == 1.0);
}

TEST_CASE("sign canonicalization makes repeated fits identical") {
    Matrix x = testutil::random_gauss(120, 10, 31);
    auto a = hnne::fit_linear(x, 4, InitMode::PcaFull, 0);
    auto b = hnne::fit_linear(x, 4, InitMode::PcaFull, 0);
    CHECK(testutil::same_bits(a.basis, b.basis));
    for (int j = 0; j < 4; ++j) {
        int arg = 0;
        for (int i = 1; i < 10; ++i)
            if (std::abs(a.basis(i, j)) > std::abs(a.basis(arg, j))) arg = i;
        CHECK(a.basis(arg, j) > 0.0);
    }
}

TEST_CASE("random projection draws a seeded orthonormal-ish frame") {
    Matrix x = testutil::random_gauss(80, 12, 7);
    auto a = hnne::fit_linear(x, 3, InitMode::RandomProjection, 99);
    auto b = hnne::fit_linear(x, 3, InitMode::RandomProjection, 99);
    auto c = hnne::fit_linear(x, 3, InitMode::RandomProjection, 100);
    CHECK(testutil::same_bits(a.basis, b.basis));
    CHECK(!testutil::same_bits(a.basis, c.basis));
    for (int j = 0; j < 3; ++j) CHECK(std::abs(a.basis.col(j).norm() - 1.0) < 1e-12);
    Matrix y = hnne::apply_linear(a, x);
    CHECK(y.rows() == 80);
    CHECK(y.cols() == 3);
    CHECK_THROWS_AS(hnne::fit_linear(x, 13, InitMode::RandomProjection, 0), hnne::InvalidArgument);
}

TEST_CASE("random points ignore the input entirely") {
    Matrix x = testutil::random_gauss(60, 5, 1);
    auto map = hnne::fit_linear(x, 2, InitMode::RandomPoints, 5);
    Matrix y1 = hnne::apply_linear(map, x);
    Matrix y2 = hnne::apply_linear(map, x * 100.0);
    CHECK(testutil::same_bits(y1, y2));
    CHECK(y1.minCoeff() >= 0.0);
    CHECK(y1.maxCoeff() < 1.0);
    auto map2 = hnne::fit_linear(x, 2, InitMode::RandomPoints, 6);
    CHECK(!testutil::same_bits(y1, hnne::apply_linear(map2, x)));
}

TEST_CASE("apply_linear rejects mismatched widths") {
    Matrix x = testutil::random_gauss(40, 6, 2);
    auto map = hnne::fit_linear(x, 2, InitMode::PcaFull, 0);
    Matrix bad = testutil::random_gauss(10, 5, 3);
    CHECK_THROWS_AS(hnne::apply_linear(map, bad), hnne::InvalidArgument);
}

TEST_CASE("blocked apply_linear equals the single-shot product") {
    Matrix x = testutil::random_gauss(5000, 8, 41);  // spans several 2048-row blocks
    auto map = hnne::fit_linear(x, 3, InitMode::PcaFull, 0);
    Matrix y = hnne::apply_linear(map, x);
    Matrix expect = (x.rowwise() - map.mean.transpose()) * map.basis;
    CHECK(testutil::same_bits(y, expect));
}
