#include <cmath>

#include "doctest.h"
#include "hnne/hierarchy.hpp"
#include "hnne/translate.hpp"
#include "util.hpp"

using hnne::ClusterAffine;
using hnne::Matrix;
using hnne::Partition;
using hnne::TranslateParams;

TEST_CASE("nn_radii matches the worked right-triangle example") {
    Matrix m(3, 2);
    m << 0.0, 0.0,
         3.0, 0.0,
         3.0, 4.0;
    auto r = hnne::nn_radii(m, hnne::NNBackend::Exact, 0);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(r[1] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(r[2] == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("place_children shifts and shrinks a group onto the parent ball") {
    Matrix parent(1, 2);
    parent << 0.0, 0.0;
    std::vector<double> radii{3.0};
    Partition part;
    part.labels = {0, 0};
    part.groups = 1;
    Matrix prelim(2, 2);
    prelim << 10.0, 0.0,
              14.0, 0.0;
    TranslateParams params;
    params.radius_fraction = 1.0 / 3.0;
    params.shrink = 1.0;
    auto [placed, affines] = hnne::place_children(parent, radii, part, prelim, params);
    CHECK(placed(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(placed(0, 1) == 0.0);
    CHECK(placed(1, 0) == doctest::Approx(1.0).epsilon(1e-15));

    // The similarity that was returned reproduces the placement.
    REQUIRE(affines.size() == 1);
    CHECK(affines[0].scale == doctest::Approx(0.5).epsilon(1e-15));
    for (int i = 0; i < 2; ++i) {
        Eigen::RowVectorXd y = affines[0].apply(prelim.row(i));
        CHECK((y - placed.row(i)).norm() < 1e-14);
    }
}

TEST_CASE("place_children puts the farthest child exactly on the boundary") {
    hnne::Rng rng(11);
    Matrix parent(3, 2);
    parent << 0.0, 0.0,
              50.0, 0.0,
              0.0, 50.0;
    std::vector<double> radii{2.0, 5.0, 0.75};
    Partition part;
    part.groups = 3;
    Matrix prelim(30, 2);
    for (int i = 0; i < 30; ++i) {
        part.labels.push_back(i % 3);
        prelim(i, 0) = 100.0 * (i % 3) + rng.next_gauss();
        prelim(i, 1) = rng.next_gauss();
    }
    TranslateParams params;
    params.radius_fraction = 1.0 / 3.0;
    params.shrink = 0.6;
    auto [placed, affines] = hnne::place_children(parent, radii, part, prelim, params);
    for (int p = 0; p < 3; ++p) {
        double target = params.shrink * params.radius_fraction * radii[p];
        double far = 0.0;
        for (int i = 0; i < 30; ++i) {
            if (part.labels[i] != p) continue;
            far = std::max(far, (placed.row(i) - parent.row(p)).norm());
            Eigen::RowVectorXd y = affines[p].apply(prelim.row(i));
            CHECK((y - placed.row(i)).norm() <= 1e-12 * (1.0 + y.norm()));
        }
        CHECK(far == doctest::Approx(target).epsilon(1e-12));
    }
}

TEST_CASE("place_children scales sparse groups up to fill the ball") {
    Matrix parent(1, 2);
    parent << 1.0, 1.0;
    std::vector<double> radii{30.0};
    Partition part;
    part.labels = {0, 0};
    part.groups = 1;
    Matrix prelim(2, 2);
    prelim << 0.0, 0.0,
              0.2, 0.0;  // much tighter than the target radius of 6
    auto [placed, affines] = hnne::place_children(parent, radii, part, prelim, TranslateParams{});
    CHECK((placed.row(0) - parent.row(0)).norm() == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(affines[0].scale == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("place_children handles singleton and coincident groups") {
    Matrix parent(2, 2);
    parent << 0.0, 0.0,
              5.0, 5.0;
    std::vector<double> radii{1.0, 1.0};
    Partition part;
    part.labels = {0, 1, 1};
    part.groups = 2;
    Matrix prelim(3, 2);
    prelim << 7.0, 7.0,
              3.0, 3.0,
              3.0, 3.0;  // group 1 collapsed to a point
    auto [placed, affines] = hnne::place_children(parent, radii, part, prelim, TranslateParams{});
    CHECK((placed.row(0) - parent.row(0)).norm() == 0.0);
    CHECK((placed.row(1) - parent.row(1)).norm() == 0.0);
    CHECK((placed.row(2) - parent.row(1)).norm() == 0.0);
    CHECK(affines[0].scale == 1.0);
}

TEST_CASE("place_children validates its inputs") {
    Matrix parent(1, 2);
    parent << 0.0, 0.0;
    Partition part;
    part.labels = {0, 0};
    part.groups = 1;
    Matrix prelim(2, 2);
    prelim << 1.0, 0.0, 2.0, 0.0;
    TranslateParams params;

    CHECK_THROWS_AS(hnne::place_children(parent, {1.0, 2.0}, part, prelim, params),
                    hnne::InvalidArgument);  // radii size
    Partition bad = part;
    bad.labels = {0, 1};
    CHECK_THROWS_AS(hnne::place_children(parent, {1.0}, bad, prelim, params),
                    hnne::InvalidArgument);  // label out of range
    params.radius_fraction = 0.0;
    CHECK_THROWS_AS(hnne::place_children(parent, {1.0}, part, prelim, params),
                    hnne::InvalidArgument);
    params.radius_fraction = 1.0 / 3.0;
    CHECK_THROWS_AS(hnne::place_children(parent, {-1.0}, part, prelim, params),
                    hnne::InvalidArgument);  // negative radius
}

TEST_CASE("translate_down nests every level inside its parents' balls") {
    Matrix m = testutil::random_uniform(900, 2, 3);
    auto h = hnne::build_hierarchy(m, hnne::NNBackend::Exact, 0);
    REQUIRE(h.top() >= 1);
    std::vector<Matrix> prelims;
    prelims.reserve(h.levels.size());
    for (auto& lvl : h.levels) prelims.push_back(lvl.centroids);  // identity projection (2-d data)
    TranslateParams params;
    params.shrink = 0.6;
    auto res = hnne::translate_down(h, prelims, m, params);

    REQUIRE(res.placed_levels.size() == h.levels.size());
    CHECK(testutil::same_bits(res.placed_levels.back(), prelims.back()));

    // Children sit within shrink * fraction * effective-radius of parents.
    for (int level = h.top(); level >= 0; --level) {
        const Matrix& parents = res.placed_levels[level];
        const auto& radii = res.level_radii[level];
        const Matrix& children = level == 0 ? res.embedding : res.placed_levels[level - 1];
        const auto& owner = level == 0 ? h.levels[0].parent_of_child.labels
                                       : h.levels[level].parent_of_child.labels;
        REQUIRE(static_cast<int>(owner.size()) == children.rows());
        for (int i = 0; i < children.rows(); ++i) {
            double lim = params.shrink * params.radius_fraction * radii[owner[i]];
            CHECK((children.row(i) - parents.row(owner[i])).norm() <= lim * (1.0 + 1e-12));
        }
        for (double r : radii) CHECK(r > 0.0);
    }
}

TEST_CASE("translate_down survives duplicate centroid coordinates") {
    // Hand-built two-level shape whose preliminary coords collide.
    hnne::Hierarchy h;
    h.base_partition.labels = {0, 0, 1, 1, 2, 2};
    h.base_partition.groups = 3;
    hnne::HierarchyLevel lvl;
    lvl.centroids = Matrix::Zero(3, 2);
    lvl.centroids << 0.0, 0.0, 4.0, 0.0, 8.0, 0.0;
    lvl.parent_of_child = h.base_partition;
    h.levels.push_back(lvl);

    std::vector<Matrix> prelims(1);
    prelims[0] = Matrix(3, 2);
    prelims[0] << 1.0, 1.0,
                  1.0, 1.0,  // duplicate of row 0
                  2.0, 1.0;
    Matrix prelim_points(6, 2);
    prelim_points << 0.0, 0.0, 0.1, 0.0, 1.0, 0.0, 1.1, 0.0, 2.0, 0.0, 2.1, 0.0;
    auto res = hnne::translate_down(h, prelims, prelim_points, TranslateParams{});
    CHECK(res.embedding.allFinite());
    for (double r : res.level_radii[0]) CHECK(r > 0.0);
}

TEST_CASE("translate_down with no levels passes the preliminary points through") {
    hnne::Hierarchy h;
    h.base_partition.labels = {0, 0};
    h.base_partition.groups = 1;
    Matrix prelim(2, 2);
    prelim << 0.0, 0.0, 1.0, 0.0;
    auto res = hnne::translate_down(h, {}, prelim, TranslateParams{});
    CHECK(testutil::same_bits(res.embedding, prelim));
    CHECK(res.placed_levels.empty());
}

TEST_CASE("inflate widens a squeezed cluster to the target ratio") {
    hnne::Rng rng(5);
    int n = 400;
    Matrix coords(n, 2);
    for (int i = 0; i < n; ++i) {
        coords(i, 0) = 10.0 * rng.next_gauss();
        coords(i, 1) = 0.5 * rng.next_gauss();  // 20:1 squeeze
    }
    Partition part;
    part.labels.assign(n, 0);
    part.groups = 1;
    Matrix anchors = coords.colwise().mean();
    Matrix before = coords;
    double extent_before = 0.0;
    for (int i = 0; i < n; ++i)
        extent_before = std::max(extent_before, (before.row(i) - anchors.row(0)).norm());

    std::vector<ClusterAffine> affines(1);
    affines[0].translation = hnne::Vector::Zero(2);
    hnne::inflate(coords, part, anchors, &affines, 2.0);

    // Axis-variance ratio over the probe frames is now near the target.
    double vx = (coords.col(0).array() - coords.col(0).mean()).square().sum();
    double vy = (coords.col(1).array() - coords.col(1).mean()).square().sum();
    double ratio = std::sqrt(std::max(vx, vy) / std::min(vx, vy));
    CHECK(ratio < 2.5);
    CHECK(ratio > 1.0);
    CHECK(!testutil::same_bits(coords, before));

    // Extent cap: the cluster did not grow beyond its anchor ball.
    double extent_after = 0.0;
    for (int i = 0; i < n; ++i)
        extent_after = std::max(extent_after, (coords.row(i) - anchors.row(0)).norm());
    CHECK(extent_after <= extent_before * (1.0 + 1e-9));

    // The composed affine replays the full map.
    for (int i = 0; i < n; ++i) {
        Eigen::RowVectorXd y = affines[0].apply(before.row(i));
        CHECK((y - coords.row(i)).norm() < 1e-9 * (1.0 + coords.row(i).norm()));
    }
    CHECK(affines[0].aspect > 1.0);

    // Re-inflating a still-squeezed cluster through an already-anisotropic
    // affine would corrupt the composition and is refused.
    Matrix squeezed_again = before;
    CHECK_THROWS_AS(hnne::inflate(squeezed_again, part, anchors, &affines, 2.0),
                    hnne::InvalidArgument);
}

TEST_CASE("inflate leaves round clusters untouched") {
    Matrix coords = testutil::random_gauss(300, 2, 8);
    Matrix before = coords;
    Partition part;
    part.labels.assign(300, 0);
    part.groups = 1;
    Matrix anchors = Matrix::Zero(1, 2);
    hnne::inflate(coords, part, anchors, nullptr, 2.0);
    CHECK(testutil::same_bits(coords, before));
}

TEST_CASE("inflate skips tiny clusters and non-planar coordinates") {
    Matrix coords(2, 2);
    coords << 0.0, 0.0, 100.0, 0.001;
    Matrix before = coords;
    Partition part;
    part.labels = {0, 0};
    part.groups = 1;
    Matrix anchors = Matrix::Zero(1, 2);
    hnne::inflate(coords, part, anchors, nullptr, 2.0);  // < 3 members: untouched
    CHECK(testutil::same_bits(coords, before));

    Matrix coords3 = testutil::random_gauss(10, 3, 2);
    Matrix before3 = coords3;
    Partition part3;
    part3.labels.assign(10, 0);
    part3.groups = 1;
    hnne::inflate(coords3, part3, Matrix::Zero(1, 3), nullptr, 2.0);  // warns, no-op
    CHECK(testutil::same_bits(coords3, before3));
}

TEST_CASE("cluster affine applies the anisotropic factorization") {
    ClusterAffine a;
    a.translation = hnne::Vector::Zero(2);
    a.translation << 1.0, -2.0;
    a.scale = 2.0;
    a.aspect = 3.0;
    a.rotation_angle = 0.0;
    Eigen::RowVectorXd x(2);
    x << 1.0, 1.0;
    Eigen::RowVectorXd y = a.apply(x);
    // scale * diag(1, aspect) * x + t = (2*1 + 1, 2*3*1 - 2)
    CHECK(y(0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(y(1) == doctest::Approx(4.0).epsilon(1e-15));

    a.rotation_angle = 1.2345;
    a.aspect = 1.0;  // aspect 1 must reduce to a pure similarity at any angle
    Eigen::RowVectorXd z = a.apply(x);
    CHECK(std::abs(z(0) - 3.0) < 1e-12);
    CHECK(std::abs(z(1) - 0.0) < 1e-12);
}
