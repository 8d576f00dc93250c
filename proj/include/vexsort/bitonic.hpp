// Loop-based Bitonic sorting kernels for 1 to 16 vectors.
//
// The network structure is generated at run time from the vector width:
// direction masks start as [F,T,F,T,...] and double their run length through
// interleave_low, permutation indices come from a lane-id vector plus a
// signed shift vector. A symmetric stage compares lanes mirrored inside each
// block; the stair stages that follow compare at a fixed stride that halves
// each iteration. small_sort pads the last vector with the type's maximum
// value so partitions of any length map onto whole vectors.

#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>

#include "vexsort/vec.hpp"

namespace vexsort {

inline constexpr std::size_t kMaxSmallSortVectors = 16;

// True iff lanes are non-decreasing. Compares the vector against its
// one-lane-left compacted self; the final lane is excluded by a governed
// count.
template <class B>
bool vector_is_sorted(const B& b, const Vec<typename B::value_type>& v) {
  const std::size_t w = b.width();
  const Pred drop_first = b.not_pred(b.first_n(1));
  const auto shifted = b.compact(drop_first, v);
  const Pred head = b.first_n(w - 1);
  const Pred le = b.compare_lte(v, shifted);
  return b.count_true(head, le) == w - 1;
}

// True iff max(lower) <= min(upper): an exchange between the two vectors
// would not move any value across them.
template <class B>
bool skip_exchange(const B& b, const Vec<typename B::value_type>& lower,
                   const Vec<typename B::value_type>& upper) {
  return !B::less(b.reduce_min(upper), b.reduce_max(lower));
}

namespace detail {

// Precomputed compare-exchange schedule: per stage, the exchange direction
// mask and the partner-permutation indices. Stage state only depends on the
// width, so one plan serves every vector of a group.
struct StagePlan {
  // full single-vector sort at W=256 needs 36 stages
  static constexpr std::size_t kMaxStages = 36;

  std::array<Pred, kMaxStages> dirs;
  std::array<IndexVec, kMaxStages> idxs;
  std::size_t count = 0;

  void push(const Pred& dir, const IndexVec& idx) {
    assert(count < kMaxStages);
    dirs[count] = dir;
    idxs[count] = idx;
    ++count;
  }
};

// Stair cascade for blocks of 2*step_out lanes: strides step_out, ..., 1.
template <class B>
void plan_stairs(const B& b, std::size_t step_out, const IndexVec& lane_ids,
                 StagePlan& plan) {
  const std::size_t w = b.width();
  assert(step_out >= 1 && step_out <= w / 2 && std::has_single_bit(step_out));
  Pred dir = b.not_pred(b.first_n(w / 2));
  for (std::size_t block = w / 2; block > step_out; block /= 2) {
    dir = b.concat_odd(dir, dir);
  }
  IndexVec inc = b.dup_index(static_cast<std::int32_t>(step_out));
  for (std::size_t s = step_out; s >= 1; s /= 2) {
    plan.push(dir, b.add(lane_ids, b.negate_where(dir, inc)));
    if (s > 1) {
      dir = b.concat_odd(dir, dir);
      inc = b.halve(inc);
    }
  }
}

// Full single-vector sort: log2(W) symmetric stages, each followed by its
// stair cascade, log2(W)(log2(W)+1)/2 stages total.
template <class B>
void plan_sort_one(const B& b, StagePlan& plan) {
  const std::size_t w = b.width();
  const IndexVec lane_ids = b.index_vector();
  Pred dir_out = b.interleave_low(b.first_n(0), b.first_n(w));  // [F,T,F,T,...]
  IndexVec shift_out = b.negate_where(dir_out, b.dup_index(1));  // [1,-1,...]
  for (std::size_t step = 1; step < w; step *= 2) {
    plan.push(dir_out, b.add(lane_ids, shift_out));
    if (step >= 2) {
      Pred dir_in = b.concat_odd(dir_out, dir_out);
      IndexVec inc = b.dup_index(static_cast<std::int32_t>(step / 2));
      for (std::size_t s = step / 2; s >= 1; s /= 2) {
        plan.push(dir_in, b.add(lane_ids, b.negate_where(dir_in, inc)));
        if (s > 1) {
          dir_in = b.concat_odd(dir_in, dir_in);
          inc = b.halve(inc);
        }
      }
    }
    if (step * 2 < w) {
      dir_out = b.interleave_low(dir_out, dir_out);
      shift_out = b.add(shift_out,
                        b.negate_where(dir_out, b.dup_index(static_cast<std::int32_t>(
                                                    step * 2))));
    }
  }
}

template <class B>
Vec<typename B::value_type> apply_plan(const B& b, const StagePlan& plan,
                                       Vec<typename B::value_type> v) {
  for (std::size_t i = 0; i < plan.count; ++i) {
    v = b.blend_min_max(plan.dirs[i], v, b.permute(v, plan.idxs[i]));
  }
  return v;
}

}  // namespace detail

// Sorts the aligned blocks of 2*step_out lanes of a vector that is bitonic
// at that granularity: strides step_out, step_out/2, ..., 1.
template <class B>
Vec<typename B::value_type> stair_stage(const B& b,
                                        Vec<typename B::value_type> v,
                                        std::size_t step_out) {
  detail::StagePlan plan;
  detail::plan_stairs(b, step_out, b.index_vector(), plan);
  return detail::apply_plan(b, plan, std::move(v));
}

// Full Bitonic sort of one vector; see plan_sort_one for the stage layout.
template <class B>
Vec<typename B::value_type> sort_one_vector(const B& b,
                                            Vec<typename B::value_type> v,
                                            bool check_sorted = false) {
  if (check_sorted && vector_is_sorted(b, v)) return v;
  detail::StagePlan plan;
  detail::plan_sort_one(b, plan);
  return detail::apply_plan(b, plan, std::move(v));
}

// First step of merging two sorted vectors: lane-wise min/max of v2 against
// reversed v1. One comparison drives both selects so an equal-key lane keeps
// one copy of each input element.
template <class B>
std::pair<Vec<typename B::value_type>, Vec<typename B::value_type>>
exchange_reverse(const B& b, const Vec<typename B::value_type>& v1,
                 const Vec<typename B::value_type>& v2) {
  const auto r = b.reverse(v1);
  const Pred le = b.compare_lte(r, v2);
  return {b.select(le, r, v2), b.select(le, v2, r)};
}

namespace detail {

// Same-lane compare-exchange between two vectors, min kept in a.
template <class B>
void exchange_straight(const B& b, Vec<typename B::value_type>& a,
                       Vec<typename B::value_type>& c) {
  const Pred le = b.compare_lte(a, c);
  const auto lo = b.select(le, a, c);
  const auto hi = b.select(le, c, a);
  a = lo;
  c = hi;
}

// Schedules shared by every vector of a group.
struct GroupPlans {
  StagePlan sort_one;     // full single-vector sort
  StagePlan stairs_full;  // stair cascade at step W/2
};

// Half-cleaner cascade over vs[base, base+span). Vector indices >= real are
// conceptually all-sentinel: exchanges with them are identities and skipped.
template <class B>
void clean_rec(const B& b, std::span<Vec<typename B::value_type>> vs,
               std::size_t base, std::size_t span, std::size_t real,
               const GroupPlans& plans) {
  if (base >= real) return;
  if (span == 1) {
    vs[base] = apply_plan(b, plans.stairs_full, std::move(vs[base]));
    return;
  }
  for (std::size_t i = 0; i < span / 2; ++i) {
    const std::size_t partner = base + i + span / 2;
    if (partner < real) exchange_straight(b, vs[base + i], vs[partner]);
  }
  clean_rec(b, vs, base, span / 2, real, plans);
  clean_rec(b, vs, base + span / 2, span / 2, real, plans);
}

// Merges two sorted halves. A reverse-exchange against an all-sentinel
// partner leaves the kept vector reversed, so that case reverses in place
// rather than skipping; when the whole upper half is absent the merge is a
// value-level identity and returns early.
template <class B>
void merge_rec(const B& b, std::span<Vec<typename B::value_type>> vs,
               std::size_t base, std::size_t span, std::size_t real,
               bool skip_opts, const GroupPlans& plans) {
  if (base >= real || base + span / 2 >= real) return;
  if (skip_opts &&
      skip_exchange(b, vs[base + span / 2 - 1], vs[base + span / 2])) {
    return;
  }
  for (std::size_t i = 0; i < span / 2; ++i) {
    const std::size_t a = base + i;  // a < base + span/2 < real
    const std::size_t partner = base + span - 1 - i;
    if (partner < real) {
      auto [lo, hi] = exchange_reverse(b, vs[a], vs[partner]);
      vs[a] = lo;
      vs[partner] = hi;
    } else {
      vs[a] = b.reverse(vs[a]);
    }
  }
  clean_rec(b, vs, base, span / 2, real, plans);
  clean_rec(b, vs, base + span / 2, span / 2, real, plans);
}

template <class B>
void sort_rec(const B& b, std::span<Vec<typename B::value_type>> vs,
              std::size_t base, std::size_t span, std::size_t real,
              bool skip_opts, const GroupPlans& plans) {
  if (base >= real) return;
  if (span == 1) {
    if (!skip_opts || !vector_is_sorted(b, vs[base])) {
      vs[base] = apply_plan(b, plans.sort_one, std::move(vs[base]));
    }
    return;
  }
  sort_rec(b, vs, base, span / 2, real, skip_opts, plans);
  sort_rec(b, vs, base + span / 2, span / 2, real, skip_opts, plans);
  merge_rec(b, vs, base, span, real, skip_opts, plans);
}

}  // namespace detail

// Sorts the concatenation of V vectors in place, V in [1, 16]. V does not
// need to be a power of two: the network runs on the next power of two with
// the missing vectors treated as all-sentinel.
template <class B>
void sort_vectors(const B& b, std::span<Vec<typename B::value_type>> vs,
                  bool skip_opts = false) {
  const std::size_t v = vs.size();
  if (v < 1 || v > kMaxSmallSortVectors) {
    throw std::invalid_argument("sort_vectors handles 1 to 16 vectors");
  }
  detail::GroupPlans plans;
  detail::plan_sort_one(b, plans.sort_one);
  if (v >= 2) {
    detail::plan_stairs(b, b.width() / 2, b.index_vector(), plans.stairs_full);
  }
  detail::sort_rec(b, vs, 0, std::bit_ceil(v), v, skip_opts, plans);
}

// Sorts view[0, n) in place for n <= 16*W. The last vector is padded with
// the sentinel value in-register; the trailing store is predicated to n so
// memory past the view is never written.
template <class B, class View>
void small_sort(const B& b, const View& view, bool skip_opts = false) {
  using T = typename B::value_type;
  static_assert(std::is_same_v<T, typename View::value_type>);
  const std::size_t w = b.width();
  const std::size_t n = view.size();
  if (n > kMaxSmallSortVectors * w) {
    throw std::invalid_argument("small_sort limit is 16 vectors");
  }
  if (n <= 1) return;

  const std::size_t v = (n + w - 1) / w;
  const std::size_t rem = n - (v - 1) * w;  // in [1, w]
  const Pred full = b.first_n(w);
  std::array<Vec<T>, kMaxSmallSortVectors> vecs;
  for (std::size_t i = 0; i + 1 < v; ++i) vecs[i] = b.load(full, view.at(i * w));
  if (rem == w) {
    vecs[v - 1] = b.load(full, view.at((v - 1) * w));
  } else {
    const Pred tail = b.first_n(rem);
    vecs[v - 1] =
        b.select(tail, b.load(tail, view.at((v - 1) * w)), b.dup(B::sentinel()));
  }

  sort_vectors(b, std::span<Vec<T>>(vecs.data(), v), skip_opts);

  for (std::size_t i = 0; i + 1 < v; ++i) b.store(full, view.at(i * w), vecs[i]);
  b.store(rem == w ? full : b.first_n(rem), view.at((v - 1) * w), vecs[v - 1]);
}

// Key/value entry points; the pair element's comparator reads keys only and
// the payload lane travels with its key through every permute and blend.
inline Vec<KeyValue> sort_one_vector_kv(const VectorBackend<KeyValue>& b,
                                        Vec<KeyValue> v,
                                        bool check_sorted = false) {
  return sort_one_vector(b, std::move(v), check_sorted);
}

inline void sort_vectors_kv(const VectorBackend<KeyValue>& b,
                            std::span<Vec<KeyValue>> vs,
                            bool skip_opts = false) {
  sort_vectors(b, vs, skip_opts);
}

template <class View>
void small_sort_kv(const VectorBackend<KeyValue>& b, const View& view,
                   bool skip_opts = false) {
  small_sort(b, view, skip_opts);
}

}  // namespace vexsort
