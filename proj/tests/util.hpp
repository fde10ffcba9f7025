#pragma once

// Small helpers shared by the test binaries: seeded data generators,
// scratch directories under the build tree, and a few comparison shims.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hnne/matrix.hpp"
#include "hnne/rng.hpp"

namespace testutil {

inline hnne::Matrix random_gauss(int n, int d, std::uint64_t seed, double scale = 1.0) {
    hnne::Rng rng(seed);
    hnne::Matrix m(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = scale * rng.next_gauss();
    return m;
}

inline hnne::Matrix random_uniform(int n, int d, std::uint64_t seed) {
    hnne::Rng rng(seed);
    hnne::Matrix m(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = rng.next_double();
    return m;
}

// Fresh empty directory under the build tree; wiped on every call so tests
// never see stale files from a previous run.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::current_path() / "test_tmp" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline bool same_ints(const hnne::IntMatrix& a, const hnne::IntMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (a(i, j) != b(i, j)) return false;
    return true;
}

inline bool same_bits(const hnne::Matrix& a, const hnne::Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (a(i, j) != b(i, j)) return false;
    return true;
}

// Partition equality that ignores label numbering: groups as sorted member
// sets, then the collection of groups sorted.
inline std::vector<std::vector<int>> canonical_groups(const std::vector<int>& labels) {
    int g = 0;
    for (int l : labels) g = std::max(g, l + 1);
    std::vector<std::vector<int>> groups(g);
    for (int i = 0; i < static_cast<int>(labels.size()); ++i) groups[labels[i]].push_back(i);
    for (auto& v : groups) std::sort(v.begin(), v.end());
    std::sort(groups.begin(), groups.end());
    return groups;
}

}  // namespace testutil
