#include "hnne/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "hnne/detail/topk.hpp"
#include "hnne/nnsearch.hpp"
#include "hnne/parallel.hpp"
#include "hnne/rng.hpp"

namespace hnne {

namespace {

constexpr double kTieTol = 1e-12;

// -1, 0, +1 comparison with an absolute tie band.
int tri_compare(double a, double b) {
  if (std::abs(a - b) <= kTieTol) return 0;
  return a < b ? -1 : 1;
}

}  // namespace

double trustworthiness(const Matrix& high, const Matrix& low, int k) {
  const std::int64_t n = high.rows();
  if (low.rows() != n) throw InvalidArgument("trustworthiness: row counts differ");
  if (k < 1) throw InvalidArgument("trustworthiness: k must be >= 1");
  if (2 * static_cast<std::int64_t>(k) >= n)
    throw InvalidArgument("trustworthiness: need 2k < n (k = " + std::to_string(k) + ", n = " +
                          std::to_string(n) + ")");
  require_finite(high, "trustworthiness high");
  require_finite(low, "trustworthiness low");

  const NeighborList low_nn = knn_exact(low, k);

  // Penalties are integers, so a parallel sum is exact and order-free.
  std::atomic<std::int64_t> total{0};
  const bool direct = n <= 4096;
  Vector sq;
  if (!direct) {
    sq.resize(n);
    for (std::int64_t j = 0; j < n; ++j) sq(j) = high.row(j).squaredNorm();
  }
  constexpr int kRowBlock = 128;
  parallel_chunks(n, kRowBlock, [&](std::int64_t b, std::int64_t e) {
    const int rows = static_cast<int>(e - b);
    Matrix d2(rows, n);
    if (direct) {
      for (int r = 0; r < rows; ++r)
        for (std::int64_t j = 0; j < n; ++j)
          d2(r, j) = (high.row(b + r) - high.row(j)).squaredNorm();
    } else {
      d2.noalias() = -2.0 * high.middleRows(b, rows) * high.transpose();
      for (int r = 0; r < rows; ++r)
        for (std::int64_t j = 0; j < n; ++j) d2(r, j) = std::max(0.0, d2(r, j) + sq(b + r) + sq(j));
    }
    std::int64_t local = 0;
    for (int r = 0; r < rows; ++r) {
      const std::int64_t i = b + r;
      for (int c = 0; c < k; ++c) {
        const int j = low_nn.indices(i, c);
        const double dj = d2(r, j);
        // Rank of j among all points other than i, ties toward lower index.
        std::int64_t rank = 1;
        for (std::int64_t j2 = 0; j2 < n; ++j2) {
          if (j2 == i || j2 == j) continue;
          const double d = d2(r, j2);
          if (d < dj || (d == dj && j2 < j)) ++rank;
        }
        if (rank > k) local += rank - k;
      }
    }
    total.fetch_add(local, std::memory_order_relaxed);
  });

  const double norm = 2.0 / (static_cast<double>(n) * k * (2.0 * static_cast<double>(n) - 3.0 * k - 1.0));
  return 1.0 - norm * static_cast<double>(total.load());
}

double knn_accuracy_cv(const Matrix& points, const std::vector<int>& labels, int k, int folds,
                       std::uint64_t seed) {
  const std::int64_t n = points.rows();
  if (static_cast<std::int64_t>(labels.size()) != n)
    throw InvalidArgument("knn_accuracy_cv: labels size does not match point count");
  if (folds < 2) throw InvalidArgument("knn_accuracy_cv: need at least 2 folds");
  if (k < 1) throw InvalidArgument("knn_accuracy_cv: k must be >= 1");
  require_finite(points, "knn_accuracy_cv input");

  std::map<int, std::vector<int>> by_class;
  for (std::int64_t i = 0; i < n; ++i) by_class[labels[i]].push_back(static_cast<int>(i));
  for (const auto& [cls, members] : by_class)
    if (static_cast<int>(members.size()) < folds)
      throw InvalidArgument("knn_accuracy_cv: class " + std::to_string(cls) + " has only " +
                            std::to_string(members.size()) + " members, fewer than " +
                            std::to_string(folds) + " folds");

  // Stratified folds: shuffle within each class, deal round-robin.
  std::vector<int> fold_of(n);
  {
    int class_index = 0;
    for (const auto& [cls, members] : by_class) {
      std::vector<int> shuffled = members;
      Rng rng(mix64(seed ^ 0x8f1bbcdcbfa53e0bull) ^ mix64(static_cast<std::uint64_t>(class_index)));
      for (int i = static_cast<int>(shuffled.size()) - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i + 1)));
        std::swap(shuffled[i], shuffled[j]);
      }
      for (std::size_t m = 0; m < shuffled.size(); ++m)
        fold_of[shuffled[m]] = static_cast<int>(m % folds);
      ++class_index;
    }
  }

  double acc_sum = 0.0;
  std::vector<int> train, test;
  for (int f = 0; f < folds; ++f) {
    train.clear();
    test.clear();
    for (std::int64_t i = 0; i < n; ++i) (fold_of[i] == f ? test : train).push_back(static_cast<int>(i));
    if (k > static_cast<int>(train.size()))
      throw InvalidArgument("knn_accuracy_cv: k exceeds training size of fold " + std::to_string(f));

    std::vector<std::uint8_t> correct(test.size(), 0);
    parallel_chunks(static_cast<std::int64_t>(test.size()), 64, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t t = b; t < e; ++t) {
        const int q = test[t];
        detail::TopK top(k);
        for (int tr : train) top.offer((points.row(q) - points.row(tr)).squaredNorm(), tr);
        std::map<int, int> votes;
        for (const auto& [d2, idx] : top.entries) ++votes[labels[idx]];
        int best_class = votes.begin()->first;
        int best_count = votes.begin()->second;
        bool tie = false;
        for (const auto& [cls, count] : votes) {
          if (count > best_count) {
            best_count = count;
            best_class = cls;
            tie = false;
          } else if (count == best_count && cls != best_class) {
            tie = true;
          }
        }
        if (tie) best_class = labels[top.entries.front().second];
        correct[t] = best_class == labels[q] ? 1 : 0;
      }
    });
    std::int64_t hits = 0;
    for (auto c : correct) hits += c;
    acc_sum += static_cast<double>(hits) / static_cast<double>(test.size());
  }
  return acc_sum / folds;
}

double centroid_triplet_accuracy(const Matrix& high, const Matrix& low, const std::vector<int>& labels) {
  const std::int64_t n = high.rows();
  if (low.rows() != n) throw InvalidArgument("centroid_triplet_accuracy: row counts differ");
  if (static_cast<std::int64_t>(labels.size()) != n)
    throw InvalidArgument("centroid_triplet_accuracy: labels size does not match point count");
  require_finite(high, "centroid_triplet_accuracy high");
  require_finite(low, "centroid_triplet_accuracy low");

  std::map<int, std::vector<int>> by_class;
  for (std::int64_t i = 0; i < n; ++i) by_class[labels[i]].push_back(static_cast<int>(i));
  const int c = static_cast<int>(by_class.size());
  if (c < 3)
    throw InvalidArgument("centroid_triplet_accuracy: needs at least 3 classes, got " + std::to_string(c));

  Matrix ch(c, high.cols()), cl(c, low.cols());
  {
    int row = 0;
    for (const auto& [cls, members] : by_class) {
      Eigen::RowVectorXd sh = Eigen::RowVectorXd::Zero(high.cols());
      Eigen::RowVectorXd sl = Eigen::RowVectorXd::Zero(low.cols());
      for (int i : members) {
        sh += high.row(i);
        sl += low.row(i);
      }
      ch.row(row) = sh / static_cast<double>(members.size());
      cl.row(row) = sl / static_cast<double>(members.size());
      ++row;
    }
  }

  Matrix dh(c, c), dl(c, c);
  for (int a = 0; a < c; ++a)
    for (int b = a + 1; b < c; ++b) {
      dh(a, b) = (ch.row(a) - ch.row(b)).norm();
      dl(a, b) = (cl.row(a) - cl.row(b)).norm();
    }

  std::atomic<std::int64_t> preserved{0};
  std::int64_t total = 0;
  for (int a = 0; a < c; ++a) total += static_cast<std::int64_t>(c - 1 - a) * (c - 2 - a) / 2;
  parallel_chunks(c, 4, [&](std::int64_t lo, std::int64_t hi) {
    std::int64_t local = 0;
    for (std::int64_t a = lo; a < hi; ++a)
      for (int b = static_cast<int>(a) + 1; b < c; ++b)
        for (int d = b + 1; d < c; ++d) {
          // A triplet survives unless some distance pair strictly reverses.
          const double h1 = dh(a, b), h2 = dh(a, d), h3 = dh(b, d);
          const double l1 = dl(a, b), l2 = dl(a, d), l3 = dl(b, d);
          const bool ok = tri_compare(h1, h2) * tri_compare(l1, l2) != -1 &&
                          tri_compare(h1, h3) * tri_compare(l1, l3) != -1 &&
                          tri_compare(h2, h3) * tri_compare(l2, l3) != -1;
          local += ok ? 1 : 0;
        }
    preserved.fetch_add(local, std::memory_order_relaxed);
  });
  return static_cast<double>(preserved.load()) / static_cast<double>(total);
}

}  // namespace hnne
