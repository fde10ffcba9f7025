#include "hnne/nnsearch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "hnne/detail/topk.hpp"
#include "hnne/parallel.hpp"
#include "hnne/rng.hpp"

namespace hnne {

namespace {

using detail::TopK;

// Direct brute force up to this many rows; above it, the gemm-blocked path.
constexpr int kDirectLimit = 4096;

void validate_knn_input(const Matrix& points, int k) {
  if (points.rows() < 2) throw InvalidArgument("knn: need at least 2 points");
  if (k < 1) throw InvalidArgument("knn: k must be >= 1");
  if (k >= points.rows())
    throw InvalidArgument("knn: k (" + std::to_string(k) + ") must be smaller than the number of points (" +
                          std::to_string(points.rows()) + ")");
  require_finite(points, "knn input");
}

NeighborList knn_exact_direct(const Matrix& points, int k) {
  const int n = static_cast<int>(points.rows());
  NeighborList out;
  out.indices.resize(n, k);
  out.distances.resize(n, k);
  parallel_chunks(n, 32, [&](std::int64_t b, std::int64_t e) {
    std::vector<std::pair<double, int>> cand(n - 1);
    for (std::int64_t i = b; i < e; ++i) {
      int m = 0;
      for (int j = 0; j < n; ++j) {
        if (j == static_cast<int>(i)) continue;
        cand[m++] = {(points.row(i) - points.row(j)).squaredNorm(), j};
      }
      std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
      for (int c = 0; c < k; ++c) {
        out.indices(i, c) = cand[c].second;
        out.distances(i, c) = std::sqrt(cand[c].first);
      }
    }
  });
  return out;
}

NeighborList knn_exact_blocked(const Matrix& points, int k) {
  const int n = static_cast<int>(points.rows());
  NeighborList out;
  out.indices.resize(n, k);
  out.distances.resize(n, k);

  Vector sq(n);
  for (int i = 0; i < n; ++i) sq(i) = points.row(i).squaredNorm();

  constexpr int kRowBlock = 256;
  constexpr int kColBlock = 4096;
  parallel_chunks(n, kRowBlock, [&](std::int64_t rb, std::int64_t re) {
    const int rows = static_cast<int>(re - rb);
    Matrix gram(rows, kColBlock);
    std::vector<TopK> best(rows, TopK(k));
    for (int cb = 0; cb < n; cb += kColBlock) {
      const int cols = std::min(kColBlock, n - cb);
      gram.topLeftCorner(rows, cols).noalias() =
          points.middleRows(rb, rows) * points.middleRows(cb, cols).transpose();
      for (int r = 0; r < rows; ++r) {
        const int i = static_cast<int>(rb) + r;
        for (int c = 0; c < cols; ++c) {
          const int j = cb + c;
          if (j == i) continue;
          const double d2 = std::max(0.0, sq(i) + sq(j) - 2.0 * gram(r, c));
          best[r].offer(d2, j);
        }
      }
    }
    // Selection used gemm arithmetic; the reported distances are recomputed
    // directly and the final order re-established under them.
    for (int r = 0; r < rows; ++r) {
      const int i = static_cast<int>(rb) + r;
      auto& sel = best[r].entries;
      for (auto& e : sel) e.first = (points.row(i) - points.row(e.second)).squaredNorm();
      std::sort(sel.begin(), sel.end());
      for (int c = 0; c < k; ++c) {
        out.indices(i, c) = sel[c].second;
        out.distances(i, c) = std::sqrt(sel[c].first);
      }
    }
  });
  return out;
}

}  // namespace

NeighborList knn_exact(const Matrix& points, int k) {
  validate_knn_input(points, k);
  if (points.rows() <= kDirectLimit) return knn_exact_direct(points, k);
  return knn_exact_blocked(points, k);
}

NeighborList knn_approx(const Matrix& points, int k, std::uint64_t seed) {
  validate_knn_input(points, k);
  const int n = static_cast<int>(points.rows());
  if (n <= 256) return knn_exact(points, k);

  // Internal list width: the descent explores neighbors-of-neighbors, so a
  // list wider than k buys recall. On small inputs the quadratic candidate
  // work is cheap, so widen further to absorb harder (higher-dimensional)
  // neighborhood structure.
  const int kint = std::min(n - 1, std::max(2 * k, n <= 4096 ? 24 : 12));
  const std::uint64_t base_seed = mix64(seed ^ 0x5bf03635d73bull);

  std::vector<int> cur_idx(static_cast<std::size_t>(n) * kint);
  std::vector<double> cur_d2(static_cast<std::size_t>(n) * kint);
  std::vector<int> nxt_idx(cur_idx.size());
  std::vector<double> nxt_d2(cur_d2.size());

  // Seeded start: kint distinct random neighbors per point.
  parallel_chunks(n, 256, [&](std::int64_t b, std::int64_t e) {
    std::vector<int> picks;
    for (std::int64_t i = b; i < e; ++i) {
      Rng rng(base_seed ^ mix64(static_cast<std::uint64_t>(i)));
      picks.clear();
      while (static_cast<int>(picks.size()) < kint) {
        int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
        if (j >= static_cast<int>(i)) ++j;
        if (std::find(picks.begin(), picks.end(), j) == picks.end()) picks.push_back(j);
      }
      TopK top(kint);
      for (int j : picks) top.offer((points.row(i) - points.row(j)).squaredNorm(), j);
      for (int c = 0; c < kint; ++c) {
        cur_idx[i * kint + c] = top.entries[c].second;
        cur_d2[i * kint + c] = top.entries[c].first;
      }
    }
  });

  // Synchronous neighbor descent: candidates come from the previous round's
  // lists (neighbors of neighbors plus reverse neighbors), every new list is
  // written to a separate buffer, and the swap happens once per round.
  const int rev_cap = kint;
  std::vector<int> rev(static_cast<std::size_t>(n) * rev_cap);
  std::vector<int> rev_cnt(n);
  constexpr int kMaxRounds = 12;
  for (int round = 0; round < kMaxRounds; ++round) {
    std::fill(rev_cnt.begin(), rev_cnt.end(), 0);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < kint; ++c) {
        const int j = cur_idx[static_cast<std::size_t>(i) * kint + c];
        if (rev_cnt[j] < rev_cap) rev[static_cast<std::size_t>(j) * rev_cap + rev_cnt[j]++] = i;
      }
    }

    std::atomic<std::int64_t> changed{0};
    parallel_chunks(n, 256, [&](std::int64_t b, std::int64_t e) {
      std::int64_t local_changed = 0;
      for (std::int64_t i = b; i < e; ++i) {
        TopK top(kint);
        const std::size_t row = static_cast<std::size_t>(i) * kint;
        for (int c = 0; c < kint; ++c) top.offer(cur_d2[row + c], cur_idx[row + c]);
        auto try_point = [&](int cand) {
          if (cand == static_cast<int>(i)) return;
          const double d2 = (points.row(i) - points.row(cand)).squaredNorm();
          top.offer(d2, cand);
        };
        auto try_list_of = [&](int j) {
          const std::size_t jrow = static_cast<std::size_t>(j) * kint;
          for (int c = 0; c < kint; ++c) try_point(cur_idx[jrow + c]);
        };
        for (int c = 0; c < kint; ++c) try_list_of(cur_idx[row + c]);
        for (int r = 0; r < rev_cnt[i]; ++r) {
          const int j = rev[static_cast<std::size_t>(i) * rev_cap + r];
          try_point(j);
          try_list_of(j);
        }
        bool diff = false;
        for (int c = 0; c < kint; ++c) {
          nxt_idx[row + c] = top.entries[c].second;
          nxt_d2[row + c] = top.entries[c].first;
          diff |= nxt_idx[row + c] != cur_idx[row + c];
        }
        local_changed += diff ? 1 : 0;
      }
      changed.fetch_add(local_changed, std::memory_order_relaxed);
    });
    cur_idx.swap(nxt_idx);
    cur_d2.swap(nxt_d2);
    const std::int64_t ch = changed.load();
    if (ch == 0) break;
    if (round >= 2 && ch * 1000 <= n) break;
  }

  NeighborList out;
  out.indices.resize(n, k);
  out.distances.resize(n, k);
  parallel_chunks(n, 1024, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) {
      const std::size_t row = static_cast<std::size_t>(i) * kint;
      for (int c = 0; c < k; ++c) {
        out.indices(i, c) = cur_idx[row + c];
        out.distances(i, c) = std::sqrt(cur_d2[row + c]);
      }
    }
  });
  return out;
}

NeighborList knn(const Matrix& points, int k, NNBackend backend, std::uint64_t seed) {
  switch (backend) {
    case NNBackend::Exact:
      return knn_exact(points, k);
    case NNBackend::Approx:
      return knn_approx(points, k, seed);
    case NNBackend::Auto:
    default:
      return points.rows() <= kExactBackendLimit ? knn_exact(points, k) : knn_approx(points, k, seed);
  }
}

std::vector<int> nearest_index(const Matrix& base, const Matrix& queries) {
  if (base.rows() < 1) throw InvalidArgument("nearest_index: empty base");
  if (base.cols() != queries.cols())
    throw InvalidArgument("nearest_index: dimension mismatch (" + std::to_string(base.cols()) + " vs " +
                          std::to_string(queries.cols()) + ")");
  require_finite(base, "nearest_index base");
  require_finite(queries, "nearest_index queries");
  const int nb = static_cast<int>(base.rows());
  std::vector<int> out(queries.rows());
  parallel_chunks(queries.rows(), 64, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t q = b; q < e; ++q) {
      double best = (queries.row(q) - base.row(0)).squaredNorm();
      int best_j = 0;
      for (int j = 1; j < nb; ++j) {
        const double d2 = (queries.row(q) - base.row(j)).squaredNorm();
        if (d2 < best) {
          best = d2;
          best_j = j;
        }
      }
      out[q] = best_j;
    }
  });
  return out;
}

}  // namespace hnne
