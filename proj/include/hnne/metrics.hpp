#pragma once

#include <cstdint>
#include <vector>

#include "hnne/matrix.hpp"

namespace hnne {

// Trustworthiness of the embedding `low` of `high`: 1 minus the normalized
// penalty over the k low-space neighbors of every point, each penalized by
// how far beyond rank k it sits in the high space. 1.0 means no intrusions.
// Requires 2k < n. Ranks and neighbor sets break distance ties by index.
double trustworthiness(const Matrix& high, const Matrix& low, int k = 5);

// Mean accuracy of a k-NN classifier over stratified cross-validation folds.
// Fold assignment is seeded and class-balanced; vote ties fall back to the
// single nearest neighbor's class. Every class must have at least `folds`
// members.
double knn_accuracy_cv(const Matrix& points, const std::vector<int>& labels, int k, int folds = 10,
                       std::uint64_t seed = 0);

// Share of class-centroid triplets whose pairwise distance order survives
// the embedding: a triplet counts as preserved when no strictly reversed
// distance pair exists between the two spaces (ties, within 1e-12, are
// compatible with anything). Requires at least 3 classes.
double centroid_triplet_accuracy(const Matrix& high, const Matrix& low, const std::vector<int>& labels);

}  // namespace hnne
