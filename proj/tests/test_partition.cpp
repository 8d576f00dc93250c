#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "vexsort/partition.hpp"

using vexsort::Interval;
using vexsort::KeyValue;
using vexsort::PartitionResult;
using vexsort::SliceView;
using vexsort::TrafficCounter;
using vexsort::VectorBackend;

namespace {

template <class T>
std::size_t count_lte(const std::vector<T>& data, Interval itv, T pivot) {
  std::size_t n = 0;
  for (std::size_t i = itv.start; i < itv.end; ++i) {
    n += !vexsort::element_traits<T>::less(pivot, data[i]) ? 1 : 0;
  }
  return n;
}

}  // namespace

TEST_CASE("select_pivot picks the median probe") {
  VectorBackend<std::int32_t> b(4);
  std::vector<std::int32_t> five = {9, 1, 5, 3, 7};
  CHECK(select_pivot(b, SliceView<std::int32_t>{five.data(), 5},
                     Interval{0, 5}) == 5);

  std::vector<std::int32_t> constant(37, 8);
  CHECK(select_pivot(b, SliceView<std::int32_t>{constant.data(), 37},
                     Interval{0, 37}) == 8);

  std::vector<std::int32_t> one = {4};
  CHECK(select_pivot(b, SliceView<std::int32_t>{one.data(), 1},
                     Interval{0, 1}) == 4);

  CHECK_THROWS_AS(select_pivot(b, SliceView<std::int32_t>{one.data(), 1},
                               Interval{1, 1}),
                  std::invalid_argument);
}

TEST_CASE("partition around the example pivot") {
  VectorBackend<std::int32_t> b(2);
  std::vector<std::int32_t> data = {3, 1, 2, 0, 5};
  const PartitionResult r = partition_in_place(
      b, SliceView<std::int32_t>{data.data(), 5}, Interval{0, 5}, 2);
  CHECK(r.boundary == 3);
  CHECK(r.left == Interval{0, 3});
  CHECK(r.right == Interval{3, 5});
  std::vector<std::int32_t> low(data.begin(), data.begin() + 3);
  std::vector<std::int32_t> high(data.begin() + 3, data.end());
  std::sort(low.begin(), low.end());
  std::sort(high.begin(), high.end());
  CHECK(low == std::vector<std::int32_t>{0, 1, 2});
  CHECK(high == std::vector<std::int32_t>{3, 5});
}

TEST_CASE("one-sided partitions") {
  VectorBackend<std::int32_t> b(4);
  std::vector<std::int32_t> data = {5, 3, 1, 4, 2, 0, 1, 5, 2, 4};
  CHECK(partition_in_place(b, SliceView<std::int32_t>{data.data(), data.size()},
                           Interval{0, data.size()}, 5)
            .boundary == data.size());
  CHECK(partition_in_place(b, SliceView<std::int32_t>{data.data(), data.size()},
                           Interval{0, data.size()}, -1)
            .boundary == 0);
  CHECK(partition_in_place(b, SliceView<std::int32_t>{data.data(), data.size()},
                           Interval{4, 4}, 3)
            .boundary == 4);
}

TEST_CASE("partition property suite with canaries") {
  std::mt19937 rng(2024);
  constexpr std::int32_t canary = 0x0C0FFEE;
  for (std::size_t w : {2u, 4u, 8u, 16u}) {
    VectorBackend<std::int32_t> b(w);
    for (int trial = 0; trial < 600; ++trial) {
      const std::size_t n = rng() % 4097;
      const std::size_t pad = w;
      std::vector<std::int32_t> buf(n + 2 * pad, canary);
      for (std::size_t i = 0; i < n; ++i) {
        buf[pad + i] = static_cast<std::int32_t>(rng() % 2048) - 1024;
      }
      std::vector<std::int32_t> snapshot(buf.begin() + pad,
                                         buf.begin() + pad + n);
      const std::int32_t pivot = static_cast<std::int32_t>(rng() % 2048) - 1024;

      const Interval itv{pad, pad + n};
      const PartitionResult r = partition_in_place(
          b, SliceView<std::int32_t>{buf.data(), buf.size()}, itv, pivot);

      // boundary equals the scalar count of elements <= pivot
      std::vector<std::int32_t> inside(buf.begin() + pad, buf.begin() + pad + n);
      REQUIRE(r.boundary - pad ==
              count_lte(snapshot, Interval{0, n}, pivot));
      for (std::size_t i = pad; i < r.boundary; ++i) {
        REQUIRE(buf[i] <= pivot);
      }
      for (std::size_t i = r.boundary; i < pad + n; ++i) {
        REQUIRE(buf[i] > pivot);
      }
      std::sort(inside.begin(), inside.end());
      std::sort(snapshot.begin(), snapshot.end());
      REQUIRE(inside == snapshot);
      for (std::size_t i = 0; i < pad; ++i) {
        REQUIRE(buf[i] == canary);
        REQUIRE(buf[buf.size() - 1 - i] == canary);
      }
    }
  }
}

TEST_CASE("partition of f64 intervals") {
  std::mt19937 rng(77);
  VectorBackend<double> b(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = rng() % 1024;
    std::vector<double> data(n);
    for (auto& x : data) x = static_cast<double>(rng() % 4096) / 8.0;
    std::vector<double> snapshot = data;
    const double pivot = static_cast<double>(rng() % 4096) / 8.0;
    const PartitionResult r = partition_in_place(
        b, SliceView<double>{data.data(), n}, Interval{0, n}, pivot);
    CHECK(r.boundary == count_lte(snapshot, Interval{0, n}, pivot));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK((i < r.boundary ? data[i] <= pivot : data[i] > pivot));
    }
    std::sort(data.begin(), data.end());
    std::sort(snapshot.begin(), snapshot.end());
    CHECK(data == snapshot);
  }
}

TEST_CASE("kv partition: payload follows its key") {
  VectorBackend<KeyValue> b(2);
  std::vector<KeyValue> data = {{3, 30}, {1, 10}, {2, 20}, {0, 0}, {5, 50}};
  const PartitionResult r = partition_in_place_kv(
      b, vexsort::KvAosView{data.data(), 5}, Interval{0, 5}, KeyValue{2, 0});
  CHECK(r.boundary == 3);
  for (const auto& kv : data) CHECK(kv.payload == 10 * kv.key);

  CHECK(partition_in_place_kv(b, vexsort::KvAosView{data.data(), 5},
                              Interval{2, 2}, KeyValue{2, 0})
            .boundary == 2);
}

TEST_CASE("kv partition: soa and aos sides hold identical key multisets") {
  std::mt19937 rng(51);
  VectorBackend<KeyValue> b(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng() % 600;
    std::vector<std::int32_t> keys(n);
    std::vector<std::int32_t> payloads(n);
    for (std::size_t i = 0; i < n; ++i) {
      keys[i] = static_cast<std::int32_t>(rng() % 128);
      payloads[i] = static_cast<std::int32_t>(i);
    }
    std::vector<KeyValue> aos(n);
    for (std::size_t i = 0; i < n; ++i) aos[i] = {keys[i], payloads[i]};
    std::vector<std::int32_t> soa_keys = keys;
    std::vector<std::int32_t> soa_payloads = payloads;
    const KeyValue pivot{static_cast<std::int32_t>(rng() % 128), 0};

    const PartitionResult ra = partition_in_place_kv(
        b, vexsort::KvAosView{aos.data(), n}, Interval{0, n}, pivot);
    const PartitionResult rs = partition_in_place_kv(
        b, vexsort::KvSoaView{soa_keys.data(), soa_payloads.data(), n},
        Interval{0, n}, pivot);

    REQUIRE(ra.boundary == rs.boundary);
    // payloads still pair with their original keys in both layouts
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(keys[static_cast<std::size_t>(aos[i].payload)] == aos[i].key);
      CHECK(keys[static_cast<std::size_t>(soa_payloads[i])] == soa_keys[i]);
    }
    // identical key multisets on each side
    std::vector<std::int32_t> aos_keys(n);
    for (std::size_t i = 0; i < n; ++i) aos_keys[i] = aos[i].key;
    std::sort(aos_keys.begin(), aos_keys.begin() + ra.boundary);
    std::sort(aos_keys.begin() + ra.boundary, aos_keys.end());
    std::sort(soa_keys.begin(), soa_keys.begin() + rs.boundary);
    std::sort(soa_keys.begin() + rs.boundary, soa_keys.end());
    REQUIRE(aos_keys == soa_keys);
  }
}

TEST_CASE("one partition pass loads at most the interval plus the saved vectors") {
  std::mt19937 rng(13);
  for (std::size_t w : {4u, 16u}) {
    TrafficCounter traffic;
    VectorBackend<std::int32_t> b(w, &traffic);
    for (std::size_t n : {static_cast<std::size_t>(2 * w),
                          static_cast<std::size_t>(257), static_cast<std::size_t>(4096)}) {
      std::vector<std::int32_t> data(n);
      for (auto& x : data) x = static_cast<std::int32_t>(rng());
      traffic.reset();
      partition_in_place(b, SliceView<std::int32_t>{data.data(), n},
                         Interval{0, n}, data[n / 2]);
      const std::uint64_t interval_bytes = n * sizeof(std::int32_t);
      CHECK(traffic.read() <= 2 * interval_bytes + 4 * w * sizeof(std::int32_t));
      CHECK(traffic.written() <= interval_bytes);
      CHECK(traffic.read() >= interval_bytes);
    }
  }
}
