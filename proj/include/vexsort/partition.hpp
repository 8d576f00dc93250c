// In-place vectorized partition around a pivot.
//
// The first and last vector of the interval are saved up front, which frees
// both extremities for writing. Each loaded vector is compared against the
// pivot once; lanes <= pivot are compacted and stored behind the left
// cursor, the rest behind the right cursor. Loads always come from the side
// with less free room so unread data is never overwritten.

#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>

#include "vexsort/vec.hpp"

namespace vexsort {

// Half-open index range [start, end).
struct Interval {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool empty() const { return start >= end; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

template <class T>
SliceView<T> subview(const SliceView<T>& v, Interval itv) {
  return {v.data + itv.start, itv.length()};
}

inline KvSoaView subview(const KvSoaView& v, Interval itv) {
  return {v.keys + itv.start, v.payloads + itv.start, itv.length()};
}

struct PartitionResult {
  std::size_t boundary = 0;  // first position with value > pivot
  Interval left;             // values <= pivot
  Interval right;            // values > pivot
};

// Median of five probes at start, start+len/4, start+len/2, start+3*len/4,
// end-1; shorter intervals use min(len, 3) probes.
template <class B, class View>
typename B::value_type select_pivot(const B&, const View& view, Interval itv) {
  using T = typename B::value_type;
  const std::size_t len = itv.length();
  if (len == 0) {
    throw std::invalid_argument("select_pivot needs a non-empty interval");
  }
  std::array<T, 5> probes;
  std::size_t k = 0;
  if (len == 1) {
    probes[k++] = view.get(itv.start);
  } else if (len == 2) {
    probes[k++] = view.get(itv.start);
    probes[k++] = view.get(itv.end - 1);
  } else if (len < 5) {
    probes[k++] = view.get(itv.start);
    probes[k++] = view.get(itv.start + len / 2);
    probes[k++] = view.get(itv.end - 1);
  } else {
    probes[k++] = view.get(itv.start);
    probes[k++] = view.get(itv.start + len / 4);
    probes[k++] = view.get(itv.start + len / 2);
    probes[k++] = view.get(itv.start + 3 * (len / 4));
    probes[k++] = view.get(itv.end - 1);
  }
  for (std::size_t i = 1; i < k; ++i) {  // insertion sort of the probes
    T x = probes[i];
    std::size_t j = i;
    while (j > 0 && B::less(x, probes[j - 1])) {
      probes[j] = probes[j - 1];
      --j;
    }
    probes[j] = x;
  }
  return probes[(k - 1) / 2];
}

namespace detail {

template <class B, class View>
std::size_t scalar_partition(const B&, const View& view, Interval itv,
                             const typename B::value_type& pivot) {
  std::size_t bound = itv.start;
  for (std::size_t j = itv.start; j < itv.end; ++j) {
    if (!B::less(pivot, view.get(j))) {  // view[j] <= pivot
      view.swap_elems(bound, j);
      ++bound;
    }
  }
  return bound;
}

}  // namespace detail

// Moves every element <= pivot in front of the returned boundary, the rest
// behind it, using two saved extremity vectors as the only scratch space.
// Intervals shorter than two vectors fall back to a scalar loop.
template <class B, class View>
PartitionResult partition_in_place(const B& b, const View& view, Interval itv,
                                   const typename B::value_type& pivot) {
  using T = typename B::value_type;
  static_assert(std::is_same_v<T, typename View::value_type>);
  const std::size_t w = b.width();

  const auto result = [&itv](std::size_t bound) {
    return PartitionResult{bound, Interval{itv.start, bound},
                           Interval{bound, itv.end}};
  };

  if (itv.empty()) return result(itv.start);
  if (itv.length() < 2 * w) {
    return result(detail::scalar_partition(b, view, itv, pivot));
  }

  const Pred full = b.first_n(w);
  const auto pivot_vec = b.dup(pivot);
  const auto left_save = b.load(full, view.at(itv.start));
  const auto right_save = b.load(full, view.at(itv.end - w));

  std::size_t left_w = itv.start;
  std::size_t right_w = itv.end;
  std::size_t read_lo = itv.start + w;
  std::size_t read_hi = itv.end - w;

  const auto flush = [&](const Vec<T>& vals, const Pred& active,
                         std::size_t active_count) {
    const Pred le = b.compare_lte(vals, pivot_vec);
    const bool whole = active_count == w;
    const Pred lo_mask = whole ? le : b.and_pred(le, active);
    const std::size_t nb_low = b.count_true(lo_mask);
    const std::size_t nb_high = active_count - nb_low;
    if (nb_low > 0) {
      b.store(b.first_n(nb_low), view.at(left_w), b.compact(lo_mask, vals));
      left_w += nb_low;
    }
    if (nb_high > 0) {
      const Pred gt = b.not_pred(le);
      const Pred hi_mask = whole ? gt : b.and_pred(gt, active);
      right_w -= nb_high;
      b.store(b.first_n(nb_high), view.at(right_w), b.compact(hi_mask, vals));
    }
  };

  while (read_hi - read_lo >= w) {
    Vec<T> vals;
    if (read_lo - left_w <= right_w - read_hi) {
      vals = b.load(full, view.at(read_lo));
      read_lo += w;
    } else {
      read_hi -= w;
      vals = b.load(full, view.at(read_hi));
    }
    flush(vals, full, w);
  }

  const std::size_t rem = read_hi - read_lo;
  if (rem > 0) {
    const Pred tail = b.first_n(rem);
    flush(b.load(tail, view.at(read_lo)), tail, rem);
  }
  flush(left_save, full, w);
  flush(right_save, full, w);
  assert(left_w == right_w);
  return result(left_w);
}

// Key/value entry point: the comparison reads keys, payloads follow their
// key through every compact and store. Works for both the two-array and the
// contiguous-pair layout.
template <class View>
PartitionResult partition_in_place_kv(const VectorBackend<KeyValue>& b,
                                      const View& view, Interval itv,
                                      const KeyValue& pivot) {
  return partition_in_place(b, view, itv, pivot);
}

}  // namespace vexsort
