#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace pafit {

// Binary sum tree over a growable array of nonnegative weights.
// Point update and prefix search are O(log n). Internal sums are doubles and
// accumulate rounding drift, so a full rebuild runs every `rebuild_period`
// updates; after a rebuild the root equals the exact left-to-right leaf sum.
//
// Prefix-search ties (u exactly on a cumulative boundary) resolve toward the
// lower index. Zero-weight leaves are never selected while the total is > 0.
class WeightTree {
 public:
  explicit WeightTree(size_t capacity_hint = 1024) { reserve_leaves(capacity_hint); }

  size_t size() const { return size_; }
  double total() const { return cap_ ? node_[1] : 0.0; }
  double weight(size_t i) const { return node_[cap_ + i]; }

  size_t push_back(double w) {
    if (size_ == cap_) grow();
    const size_t idx = size_++;
    set(idx, w);
    return idx;
  }

  void set(size_t i, double w) {
    assert(i < size_ && w >= 0.0);
    size_t p = cap_ + i;
    node_[p] = w;
    for (p >>= 1; p >= 1; p >>= 1) node_[p] = node_[2 * p] + node_[2 * p + 1];
    maybe_rebuild();
  }

  void add(size_t i, double dw) { set(i, node_[cap_ + i] + dw); }

  // Largest-prefix search: returns the leaf containing offset u in the
  // cumulative weight layout, for u in [0, total()).
  size_t sample(double u) const {
    assert(size_ > 0);
    size_t p = 1;
    while (p < cap_) {
      const double left = node_[2 * p];
      if (u < left) {
        p = 2 * p;
      } else if (u == left && left > 0.0) {
        // exact boundary: lower index wins, i.e. the rightmost positive
        // leaf of the left subtree
        p = 2 * p;
        while (p < cap_) p = (node_[2 * p + 1] > 0.0) ? 2 * p + 1 : 2 * p;
        break;
      } else {
        u -= left;
        p = 2 * p + 1;
      }
    }
    size_t leaf = p - cap_;
    return leaf < size_ ? leaf : size_ - 1;
  }

  // Prefix search restricted to leaves [lo, size): selects proportional to
  // the weights of the suffix, u in [0, total_from(lo)).
  size_t sample_from(size_t lo, double u) const {
    // offset u by the prefix mass before lo, then search globally
    const double prefix = prefix_sum(lo);
    size_t leaf = sample(prefix + u);
    if (leaf < lo) leaf = lo;  // guards rounding at the boundary
    return leaf;
  }

  // Sum of weights of leaves [0, i).
  double prefix_sum(size_t i) const {
    double s = 0.0;
    size_t p = cap_ + i;
    while (p > 1) {
      if (p & 1) s += node_[p - 1];
      p >>= 1;
    }
    return s;
  }

  double total_from(size_t lo) const { return total() - prefix_sum(lo); }

  // Exact recomputation of all internal sums from the leaves.
  void rebuild() {
    for (size_t p = cap_ - 1; p >= 1; --p) node_[p] = node_[2 * p] + node_[2 * p + 1];
    updates_since_rebuild_ = 0;
  }

  static constexpr uint64_t rebuild_period = uint64_t(1) << 20;

 private:
  void reserve_leaves(size_t n) {
    size_t cap = 1;
    while (cap < n) cap <<= 1;
    cap_ = cap;
    node_.assign(2 * cap_, 0.0);
  }

  void grow() {
    std::vector<double> leaves(node_.begin() + cap_, node_.begin() + cap_ + size_);
    reserve_leaves(cap_ * 2);
    for (size_t i = 0; i < leaves.size(); ++i) node_[cap_ + i] = leaves[i];
    rebuild();
  }

  void maybe_rebuild() {
    if (++updates_since_rebuild_ >= rebuild_period) rebuild();
  }

  size_t cap_ = 0;
  size_t size_ = 0;
  uint64_t updates_since_rebuild_ = 0;
  std::vector<double> node_;  // 1-based heap layout; leaves at [cap_, 2*cap_)
};

// Serial reference for the same contract: linear-scan prefix search with the
// identical tie rule. Kept for tests and the benchmark.
class LinearWeights {
 public:
  size_t size() const { return w_.size(); }
  double total() const {
    double s = 0.0;
    for (double x : w_) s += x;
    return s;
  }
  double weight(size_t i) const { return w_[i]; }
  size_t push_back(double w) {
    w_.push_back(w);
    return w_.size() - 1;
  }
  void set(size_t i, double w) { w_[i] = w; }
  void add(size_t i, double dw) { w_[i] += dw; }

  size_t sample(double u) const {
    double acc = 0.0;
    size_t last_positive = 0;
    for (size_t i = 0; i < w_.size(); ++i) {
      acc += w_[i];
      if (w_[i] > 0.0) last_positive = i;
      if (u < acc || (u == acc && w_[i] > 0.0)) return i;
    }
    return last_positive;
  }

 private:
  std::vector<double> w_;
};

}  // namespace pafit
