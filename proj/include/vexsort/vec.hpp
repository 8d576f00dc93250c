// Runtime-width vector and predicate model used by all sorting kernels.
//
// The lane count W is chosen when a backend is constructed (any power of two
// in [2, 256]) and is deliberately not a compile-time constant: kernels that
// build their permutation indices and direction masks with the operations
// below work unchanged for every width. The backend here is a scalar
// reference implementation; a counting backend is the same class with a
// TrafficCounter attached, which tallies the bytes moved by predicated
// loads and stores.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

namespace vexsort {

inline constexpr std::size_t kMaxLanes = 256;

// 32-bit key with a 32-bit payload that travels with it. Ordering reads the
// key only.
struct KeyValue {
  std::int32_t key;
  std::int32_t payload;
  friend bool operator==(const KeyValue&, const KeyValue&) = default;
};

template <class T>
struct element_traits;

template <>
struct element_traits<std::int32_t> {
  static constexpr std::size_t memory_bytes = sizeof(std::int32_t);
  static bool less(std::int32_t a, std::int32_t b) { return a < b; }
  static constexpr std::int32_t sentinel() {
    return std::numeric_limits<std::int32_t>::max();
  }
  static constexpr std::int32_t lowest() {
    return std::numeric_limits<std::int32_t>::min();
  }
  // Pre: v > lowest().
  static std::int32_t predecessor(std::int32_t v) { return v - 1; }
};

template <>
struct element_traits<double> {
  static constexpr std::size_t memory_bytes = sizeof(double);
  static bool less(double a, double b) { return a < b; }
  static constexpr double sentinel() {
    return std::numeric_limits<double>::infinity();
  }
  static constexpr double lowest() {
    return -std::numeric_limits<double>::infinity();
  }
  static double predecessor(double v) { return std::nextafter(v, lowest()); }
};

template <>
struct element_traits<KeyValue> {
  // Both layouts move one key plus one payload per lane.
  static constexpr std::size_t memory_bytes = 2 * sizeof(std::int32_t);
  static bool less(const KeyValue& a, const KeyValue& b) {
    return a.key < b.key;
  }
  static constexpr KeyValue sentinel() {
    return {std::numeric_limits<std::int32_t>::max(), 0};
  }
  static constexpr KeyValue lowest() {
    return {std::numeric_limits<std::int32_t>::min(), 0};
  }
  static KeyValue predecessor(const KeyValue& v) {
    return {v.key - 1, v.payload};
  }
};

// Bytes moved by predicated loads/stores. Increments are relaxed atomics so
// parallel workers can share one counter; totals are read after joins.
struct TrafficCounter {
  std::atomic<std::uint64_t> bytes_read{0};
  std::atomic<std::uint64_t> bytes_written{0};

  void reset() {
    bytes_read.store(0, std::memory_order_relaxed);
    bytes_written.store(0, std::memory_order_relaxed);
  }
  std::uint64_t read() const {
    return bytes_read.load(std::memory_order_relaxed);
  }
  std::uint64_t written() const {
    return bytes_written.load(std::memory_order_relaxed);
  }
  std::uint64_t total() const { return read() + written(); }
};

// Counts compare-exchange stages (blend_min_max calls) for the network
// structure checks.
struct OpCounters {
  std::atomic<std::uint64_t> blend_calls{0};

  void reset() { blend_calls.store(0, std::memory_order_relaxed); }
  std::uint64_t blends() const {
    return blend_calls.load(std::memory_order_relaxed);
  }
};

// Fixed-capacity value vector; only lanes [0, width) are meaningful and
// copies transfer just those lanes.
template <class T>
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t width) : width_(static_cast<std::uint32_t>(width)) {}

  Vec(const Vec& other) : width_(other.width_) {
    std::copy_n(other.lanes_.data(), width_, lanes_.data());
  }
  Vec& operator=(const Vec& other) {
    width_ = other.width_;
    std::copy_n(other.lanes_.data(), width_, lanes_.data());
    return *this;
  }

  std::size_t width() const { return width_; }
  T& operator[](std::size_t i) { return lanes_[i]; }
  const T& operator[](std::size_t i) const { return lanes_[i]; }

  friend bool operator==(const Vec& a, const Vec& b) {
    if (a.width_ != b.width_) return false;
    for (std::size_t i = 0; i < a.width_; ++i) {
      if (!(a.lanes_[i] == b.lanes_[i])) return false;
    }
    return true;
  }

 private:
  std::uint32_t width_ = 0;
  std::array<T, kMaxLanes> lanes_;
};

// Per-lane boolean mask.
class Pred {
 public:
  Pred() = default;
  explicit Pred(std::size_t width) : width_(static_cast<std::uint32_t>(width)) {}

  Pred(const Pred& other) : width_(other.width_) {
    std::copy_n(other.lanes_.data(), width_, lanes_.data());
  }
  Pred& operator=(const Pred& other) {
    width_ = other.width_;
    std::copy_n(other.lanes_.data(), width_, lanes_.data());
    return *this;
  }

  std::size_t width() const { return width_; }
  bool operator[](std::size_t i) const { return lanes_[i] != 0; }
  void set(std::size_t i, bool v) { lanes_[i] = v ? 1 : 0; }

  friend bool operator==(const Pred& a, const Pred& b) {
    if (a.width_ != b.width_) return false;
    for (std::size_t i = 0; i < a.width_; ++i) {
      if ((a.lanes_[i] != 0) != (b.lanes_[i] != 0)) return false;
    }
    return true;
  }

 private:
  std::uint32_t width_ = 0;
  std::array<std::uint8_t, kMaxLanes> lanes_;
};

using IndexVec = Vec<std::int32_t>;

// Addresses one lane of a split key/payload pair.
struct KvSoaPtr {
  std::int32_t* keys;
  std::int32_t* payloads;
};

template <class T>
class VectorBackend {
 public:
  using value_type = T;
  using traits = element_traits<T>;

  explicit VectorBackend(std::size_t width, TrafficCounter* traffic = nullptr,
                         OpCounters* ops = nullptr)
      : width_(width), traffic_(traffic), ops_(ops) {
    if (width < 2 || width > kMaxLanes || (width & (width - 1)) != 0) {
      throw std::invalid_argument(
          "vector width must be a power of two in [2, 256]");
    }
  }

  std::size_t width() const { return width_; }
  TrafficCounter* traffic() const { return traffic_; }
  OpCounters* op_counters() const { return ops_; }

  static bool less(const T& a, const T& b) { return traits::less(a, b); }
  static T sentinel() { return traits::sentinel(); }

  // [0, 1, ..., W-1]
  IndexVec index_vector() const {
    IndexVec r(width_);
    for (std::size_t i = 0; i < width_; ++i) r[i] = static_cast<std::int32_t>(i);
    return r;
  }

  Vec<T> dup(const T& c) const {
    Vec<T> r(width_);
    for (std::size_t i = 0; i < width_; ++i) r[i] = c;
    return r;
  }

  IndexVec dup_index(std::int32_t c) const {
    IndexVec r(width_);
    for (std::size_t i = 0; i < width_; ++i) r[i] = c;
    return r;
  }

  IndexVec add(const IndexVec& a, const IndexVec& b) const {
    assert(a.width() == width_ && b.width() == width_);
    IndexVec r(width_);
    for (std::size_t i = 0; i < width_; ++i) r[i] = a[i] + b[i];
    return r;
  }

  IndexVec sub(const IndexVec& a, const IndexVec& b) const {
    assert(a.width() == width_ && b.width() == width_);
    IndexVec r(width_);
    for (std::size_t i = 0; i < width_; ++i) r[i] = a[i] - b[i];
    return r;
  }

  // Negates the active lanes, merges the rest through.
  IndexVec negate_where(const Pred& p, const IndexVec& v) const {
    assert(p.width() == width_ && v.width() == width_);
    IndexVec r(width_);
    for (std::size_t i = 0; i < width_; ++i) r[i] = p[i] ? -v[i] : v[i];
    return r;
  }

  // Pre: lanes are even and non-negative (step vectors only).
  IndexVec halve(const IndexVec& v) const {
    assert(v.width() == width_);
    IndexVec r(width_);
    for (std::size_t i = 0; i < width_; ++i) {
      assert(v[i] >= 0 && v[i] % 2 == 0);
      r[i] = v[i] / 2;
    }
    return r;
  }

  Vec<T> interleave_low(const Vec<T>& a, const Vec<T>& b) const {
    assert(a.width() == width_ && b.width() == width_);
    Vec<T> r(width_);
    for (std::size_t i = 0; i < width_ / 2; ++i) {
      r[2 * i] = a[i];
      r[2 * i + 1] = b[i];
    }
    return r;
  }

  Pred interleave_low(const Pred& a, const Pred& b) const {
    assert(a.width() == width_ && b.width() == width_);
    Pred r(width_);
    for (std::size_t i = 0; i < width_ / 2; ++i) {
      r.set(2 * i, a[i]);
      r.set(2 * i + 1, b[i]);
    }
    return r;
  }

  // Odd lanes of a then odd lanes of b.
  Pred concat_odd(const Pred& a, const Pred& b) const {
    assert(a.width() == width_ && b.width() == width_);
    Pred r(width_);
    for (std::size_t i = 0; i < width_ / 2; ++i) {
      r.set(i, a[2 * i + 1]);
      r.set(width_ / 2 + i, b[2 * i + 1]);
    }
    return r;
  }

  Vec<T> permute(const Vec<T>& v, const IndexVec& idx) const {
    assert(v.width() == width_ && idx.width() == width_);
    Vec<T> r(width_);
    for (std::size_t i = 0; i < width_; ++i) {
      const std::int32_t j = idx[i];
      if (j < 0 || static_cast<std::size_t>(j) >= width_) {
        throw std::out_of_range("permute index outside [0, width)");
      }
      r[i] = v[static_cast<std::size_t>(j)];
    }
    return r;
  }

  Pred compare_lte(const Vec<T>& a, const Vec<T>& b) const {
    assert(a.width() == width_ && b.width() == width_);
    Pred r(width_);
    for (std::size_t i = 0; i < width_; ++i) r.set(i, !traits::less(b[i], a[i]));
    return r;
  }

  Pred not_pred(const Pred& p) const {
    assert(p.width() == width_);
    Pred r(width_);
    for (std::size_t i = 0; i < width_; ++i) r.set(i, !p[i]);
    return r;
  }

  Pred and_pred(const Pred& a, const Pred& b) const {
    assert(a.width() == width_ && b.width() == width_);
    Pred r(width_);
    for (std::size_t i = 0; i < width_; ++i) r.set(i, a[i] && b[i]);
    return r;
  }

  // Lane i = p[i] ? a[i] : b[i]
  Vec<T> select(const Pred& p, const Vec<T>& a, const Vec<T>& b) const {
    assert(p.width() == width_ && a.width() == width_ && b.width() == width_);
    Vec<T> r(width_);
    for (std::size_t i = 0; i < width_; ++i) r[i] = p[i] ? a[i] : b[i];
    return r;
  }

  // Lane i = dir[i] ? max(a[i], b[i]) : min(a[i], b[i]).
  // Equal keys resolve to a's lane on both sides, so a compare-exchange
  // between equal keys moves nothing; this keeps pair multisets intact when
  // payloads differ under the same key.
  Vec<T> blend_min_max(const Pred& dir, const Vec<T>& a, const Vec<T>& b) const {
    assert(dir.width() == width_ && a.width() == width_ && b.width() == width_);
    if (ops_ != nullptr) {
      ops_->blend_calls.fetch_add(1, std::memory_order_relaxed);
    }
    Vec<T> r(width_);
    for (std::size_t i = 0; i < width_; ++i) {
      if (dir[i]) {
        r[i] = traits::less(a[i], b[i]) ? b[i] : a[i];
      } else {
        r[i] = traits::less(b[i], a[i]) ? b[i] : a[i];
      }
    }
    return r;
  }

  // Lanes [0, k) true. Pre: 0 <= k <= W.
  Pred first_n(std::size_t k) const {
    assert(k <= width_);
    Pred r(width_);
    for (std::size_t i = 0; i < width_; ++i) r.set(i, i < k);
    return r;
  }

  std::size_t count_true(const Pred& p) const {
    assert(p.width() == width_);
    std::size_t n = 0;
    for (std::size_t i = 0; i < width_; ++i) n += p[i] ? 1 : 0;
    return n;
  }

  // Counts true lanes of p under a governing predicate.
  std::size_t count_true(const Pred& govern, const Pred& p) const {
    assert(govern.width() == width_ && p.width() == width_);
    std::size_t n = 0;
    for (std::size_t i = 0; i < width_; ++i) n += (govern[i] && p[i]) ? 1 : 0;
    return n;
  }

  // Active lanes of v packed to the front, zero-filled tail.
  Vec<T> compact(const Pred& p, const Vec<T>& v) const {
    assert(p.width() == width_ && v.width() == width_);
    Vec<T> r(width_);
    std::size_t k = 0;
    for (std::size_t i = 0; i < width_; ++i) {
      r[k] = v[i];  // inactive lanes are overwritten by the next active one
      k += p[i] ? 1 : 0;
    }
    for (; k < width_; ++k) r[k] = T{};
    return r;
  }

  Vec<T> reverse(const Vec<T>& v) const {
    assert(v.width() == width_);
    Vec<T> r(width_);
    for (std::size_t i = 0; i < width_; ++i) r[i] = v[width_ - 1 - i];
    return r;
  }

  T reduce_min(const Vec<T>& v) const {
    assert(v.width() == width_);
    T m = v[0];
    for (std::size_t i = 1; i < width_; ++i) {
      if (traits::less(v[i], m)) m = v[i];
    }
    return m;
  }

  T reduce_max(const Vec<T>& v) const {
    assert(v.width() == width_);
    T m = v[0];
    for (std::size_t i = 1; i < width_; ++i) {
      if (traits::less(m, v[i])) m = v[i];
    }
    return m;
  }

  // Active lane i reads src[i]; inactive lanes are zero-filled.
  Vec<T> load(const Pred& p, const T* src) const {
    assert(p.width() == width_);
    Vec<T> r(width_);
    for (std::size_t i = 0; i < width_; ++i) {
      if (p[i]) {
        r[i] = src[i];
      } else {
        r[i] = T{};
      }
    }
    if (traffic_ != nullptr) count_read(count_true(p));
    return r;
  }

  // Active lane i writes dst[i]; inactive lanes leave memory untouched.
  void store(const Pred& p, T* dst, const Vec<T>& v) const {
    assert(p.width() == width_ && v.width() == width_);
    for (std::size_t i = 0; i < width_; ++i) {
      if (p[i]) dst[i] = v[i];
    }
    if (traffic_ != nullptr) count_written(count_true(p));
  }

  Vec<KeyValue> load(const Pred& p, KvSoaPtr src) const
    requires std::same_as<T, KeyValue>
  {
    assert(p.width() == width_);
    Vec<KeyValue> r(width_);
    for (std::size_t i = 0; i < width_; ++i) {
      if (p[i]) {
        r[i] = KeyValue{src.keys[i], src.payloads[i]};
      } else {
        r[i] = KeyValue{};
      }
    }
    if (traffic_ != nullptr) count_read(count_true(p));
    return r;
  }

  void store(const Pred& p, KvSoaPtr dst, const Vec<KeyValue>& v) const
    requires std::same_as<T, KeyValue>
  {
    assert(p.width() == width_ && v.width() == width_);
    for (std::size_t i = 0; i < width_; ++i) {
      if (p[i]) {
        dst.keys[i] = v[i].key;
        dst.payloads[i] = v[i].payload;
      }
    }
    if (traffic_ != nullptr) count_written(count_true(p));
  }

 private:
  void count_read(std::size_t active_lanes) const {
    if (traffic_ != nullptr) {
      traffic_->bytes_read.fetch_add(active_lanes * traits::memory_bytes,
                                     std::memory_order_relaxed);
    }
  }
  void count_written(std::size_t active_lanes) const {
    if (traffic_ != nullptr) {
      traffic_->bytes_written.fetch_add(active_lanes * traits::memory_bytes,
                                        std::memory_order_relaxed);
    }
  }

  std::size_t width_;
  TrafficCounter* traffic_;
  OpCounters* ops_;
};

// Memory views the kernels sort through. at(i) yields whatever the backend's
// load/store accepts for that layout; get/set/swap_elems are the scalar
// accessors used by pivot probing and the short-interval fallback.
template <class T>
struct SliceView {
  using value_type = T;

  T* data = nullptr;
  std::size_t count = 0;

  std::size_t size() const { return count; }
  T* at(std::size_t i) const { return data + i; }
  T get(std::size_t i) const { return data[i]; }
  void set(std::size_t i, const T& v) const { data[i] = v; }
  void swap_elems(std::size_t i, std::size_t j) const {
    std::swap(data[i], data[j]);
  }
};

using KvAosView = SliceView<KeyValue>;

struct KvSoaView {
  using value_type = KeyValue;

  std::int32_t* keys = nullptr;
  std::int32_t* payloads = nullptr;
  std::size_t count = 0;

  std::size_t size() const { return count; }
  KvSoaPtr at(std::size_t i) const { return {keys + i, payloads + i}; }
  KeyValue get(std::size_t i) const { return {keys[i], payloads[i]}; }
  void set(std::size_t i, const KeyValue& v) const {
    keys[i] = v.key;
    payloads[i] = v.payload;
  }
  void swap_elems(std::size_t i, std::size_t j) const {
    std::swap(keys[i], keys[j]);
    std::swap(payloads[i], payloads[j]);
  }
};

}  // namespace vexsort
