// Sequential hybrid sort: recursive vectorized partitioning down to a
// small-partition threshold, then the Bitonic small_sort. The recursion is
// an explicit loop over a fixed interval stack; iterating on the smaller
// side and pushing the larger bounds the stack by O(log n).

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "vexsort/bitonic.hpp"
#include "vexsort/partition.hpp"

namespace vexsort {

struct SortConfig {
  std::size_t small_threshold_vectors = 16;  // partitions <= this many vectors
  std::size_t l1_bytes = 64 * 1024;          // parallel sequential-leaf cutoff
  std::size_t workers = 1;
  bool enable_skip_optimizations = false;
};

inline void validate(const SortConfig& config) {
  if (config.small_threshold_vectors < 1 ||
      config.small_threshold_vectors > kMaxSmallSortVectors) {
    throw std::invalid_argument("small_threshold_vectors must be in [1, 16]");
  }
  if (config.l1_bytes == 0) throw std::invalid_argument("l1_bytes must be > 0");
  if (config.workers < 1) throw std::invalid_argument("workers must be >= 1");
}

struct SortStats {
  std::size_t max_stack_depth = 0;
  std::uint64_t partition_calls = 0;
};

namespace detail {

struct Split {
  Interval left;
  Interval right;
  bool right_done = false;  // right side needs no further work
};

// Splits cur around a selected pivot and guarantees progress. When the pivot
// equals the interval maximum the first pass leaves the right side empty;
// the interval is then re-partitioned against the pivot's predecessor, which
// strips the equal-to-pivot run off the tail as an already-sorted right
// side.
template <class B, class View>
Split split_interval(const B& b, const View& view, Interval cur,
                     std::uint64_t* partition_calls) {
  using T = typename B::value_type;
  const T pivot = select_pivot(b, view, cur);
  PartitionResult r = partition_in_place(b, view, cur, pivot);
  if (partition_calls != nullptr) ++(*partition_calls);
  if (r.boundary == cur.end) {
    if (!B::less(B::traits::lowest(), pivot)) {
      // every element equals the minimum representable value
      return {Interval{cur.start, cur.start}, cur, true};
    }
    r = partition_in_place(b, view, cur,
                           element_traits<T>::predecessor(pivot));
    if (partition_calls != nullptr) ++(*partition_calls);
    return {r.left, r.right, true};
  }
  assert(r.boundary > cur.start);  // the pivot value itself sorts left
  return {r.left, r.right, false};
}

}  // namespace detail

// Sorts view[itv) in place. Elements must be free of NaN.
template <class B, class View>
void sort_interval(const B& b, const View& view, Interval itv,
                   const SortConfig& config = {}, SortStats* stats = nullptr) {
  validate(config);
  const std::size_t threshold = config.small_threshold_vectors * b.width();

  std::array<Interval, 160> stack;  // ample for any address-space n
  std::size_t depth = 0;
  Interval cur = itv;
  for (;;) {
    while (cur.length() > threshold) {
      const detail::Split s = detail::split_interval(
          b, view, cur, stats != nullptr ? &stats->partition_calls : nullptr);
      if (s.right_done) {
        cur = s.left;
        continue;
      }
      Interval small = s.left;
      Interval big = s.right;
      if (big.length() < small.length()) std::swap(small, big);
      assert(depth < stack.size());
      stack[depth++] = big;
      if (stats != nullptr) {
        stats->max_stack_depth = std::max(stats->max_stack_depth, depth);
      }
      cur = small;
    }
    small_sort(b, subview(view, cur), config.enable_skip_optimizations);
    if (depth == 0) break;
    cur = stack[--depth];
  }
}

template <class B, class View>
void sort(const B& b, const View& view, const SortConfig& config = {},
          SortStats* stats = nullptr) {
  static_assert(
      std::is_same_v<typename B::value_type, typename View::value_type>);
  if (view.size() <= 1) return;
  sort_interval(b, view, Interval{0, view.size()}, config, stats);
}

// Key/value sort: ordered by key, payloads follow. View is KvSoaView or
// KvAosView.
template <class View>
void sort_kv(const VectorBackend<KeyValue>& b, const View& view,
             const SortConfig& config = {}, SortStats* stats = nullptr) {
  sort(b, view, config, stats);
}

}  // namespace vexsort
