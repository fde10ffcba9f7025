#pragma once

#include <algorithm>
#include <utility>
#include <vector>

namespace hnne::detail {

// Bounded ascending (value, index) list. offer() keeps the best k entries
// under lexicographic order and rejects exact duplicates, so a candidate may
// be offered more than once.
struct TopK {
  std::vector<std::pair<double, int>> entries;
  int cap;

  explicit TopK(int k) : cap(k) { entries.reserve(k); }

  bool worse_than_worst(double d, int idx) const {
    if (static_cast<int>(entries.size()) < cap) return false;
    const auto& w = entries.back();
    return d > w.first || (d == w.first && idx >= w.second);
  }

  void offer(double d, int idx) {
    if (worse_than_worst(d, idx)) return;
    const std::pair<double, int> e{d, idx};
    auto pos = std::lower_bound(entries.begin(), entries.end(), e);
    if (pos != entries.end() && *pos == e) return;
    if (static_cast<int>(entries.size()) == cap) entries.pop_back();
    entries.insert(std::lower_bound(entries.begin(), entries.end(), e), e);
  }
};

}  // namespace hnne::detail
