// Benchmark and verification harness behind the command-line tool: input
// generation, timed-and-verified runs of each algorithm, CSV output. Every
// timed run is checked for sortedness and multiset preservation against a
// snapshot; nothing unverified is reported.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "vexsort/parallel.hpp"
#include "vexsort/sort.hpp"

namespace vexsort::bench {

enum class Algo { small_sort, partition, qs, qs_par, baseline_std };
enum class ElementKind { i32, f64, kv_soa, kv_aos };
enum class InputKind { uniform, sorted, reverse, constant, sawtooth };

inline Algo parse_algo(const std::string& s) {
  if (s == "small-sort") return Algo::small_sort;
  if (s == "partition") return Algo::partition;
  if (s == "qs") return Algo::qs;
  if (s == "qs-par") return Algo::qs_par;
  if (s == "baseline-std") return Algo::baseline_std;
  throw std::invalid_argument("unknown algo: " + s);
}

inline std::string algo_name(Algo a) {
  switch (a) {
    case Algo::small_sort: return "small-sort";
    case Algo::partition: return "partition";
    case Algo::qs: return "qs";
    case Algo::qs_par: return "qs-par";
    case Algo::baseline_std: return "baseline-std";
  }
  return "?";
}

inline ElementKind parse_element_kind(const std::string& s) {
  if (s == "i32") return ElementKind::i32;
  if (s == "f64") return ElementKind::f64;
  if (s == "kv-soa") return ElementKind::kv_soa;
  if (s == "kv-aos") return ElementKind::kv_aos;
  throw std::invalid_argument("unknown element kind: " + s);
}

inline std::string element_kind_name(ElementKind k) {
  switch (k) {
    case ElementKind::i32: return "i32";
    case ElementKind::f64: return "f64";
    case ElementKind::kv_soa: return "kv-soa";
    case ElementKind::kv_aos: return "kv-aos";
  }
  return "?";
}

inline InputKind parse_input_kind(const std::string& s) {
  if (s == "uniform") return InputKind::uniform;
  if (s == "sorted") return InputKind::sorted;
  if (s == "reverse") return InputKind::reverse;
  if (s == "constant") return InputKind::constant;
  if (s == "sawtooth") return InputKind::sawtooth;
  throw std::invalid_argument("unknown input kind: " + s);
}

// Deterministic input generator: identical (kind, n, seed) yields identical
// data.
template <class T>
std::vector<T> generate_input(InputKind kind, std::size_t n,
                              std::uint64_t seed) {
  static_assert(std::is_same_v<T, std::int32_t> || std::is_same_v<T, double>);
  std::vector<T> data(n);
  std::mt19937_64 rng(seed);
  const auto fill_uniform = [&] {
    if constexpr (std::is_same_v<T, std::int32_t>) {
      std::uniform_int_distribution<std::int32_t> dist(
          std::numeric_limits<std::int32_t>::min(),
          std::numeric_limits<std::int32_t>::max());
      for (auto& v : data) v = dist(rng);
    } else {
      std::uniform_real_distribution<double> dist(-1.0e9, 1.0e9);
      for (auto& v : data) v = dist(rng);
    }
  };
  switch (kind) {
    case InputKind::uniform:
      fill_uniform();
      break;
    case InputKind::sorted:
      fill_uniform();
      std::sort(data.begin(), data.end());
      break;
    case InputKind::reverse:
      fill_uniform();
      std::sort(data.begin(), data.end(), std::greater<T>());
      break;
    case InputKind::constant:
      std::fill(data.begin(), data.end(), static_cast<T>(42));
      break;
    case InputKind::sawtooth:
      for (std::size_t i = 0; i < n; ++i) {
        data[i] = static_cast<T>(i & 1023);
      }
      break;
  }
  return data;
}

inline double time_metric(std::chrono::nanoseconds elapsed, std::size_t n) {
  const double denom =
      n < 2 ? 1.0 : static_cast<double>(n) * std::log(static_cast<double>(n));
  return static_cast<double>(elapsed.count()) / denom;
}

struct RunResult {
  double ns_per_element_over_nlogn = 0.0;
  std::uint64_t bytes_read = 0;
  std::uint64_t bytes_written = 0;
  bool verified = false;
};

namespace detail {

inline bool lt_kv_lex(const KeyValue& a, const KeyValue& b) {
  return a.key != b.key ? a.key < b.key : a.payload < b.payload;
}

// Runs one scalar-kind benchmark iteration over freshly generated data.
template <class T>
RunResult run_scalar(Algo algo, std::size_t n, std::size_t width,
                     std::size_t workers, std::uint64_t seed,
                     bool count_traffic, bool skip_opt, InputKind input) {
  TrafficCounter traffic;
  VectorBackend<T> backend(width, count_traffic ? &traffic : nullptr);
  SortConfig config;
  config.workers = workers;
  config.enable_skip_optimizations = skip_opt;

  std::vector<T> data = generate_input<T>(input, n, seed);
  const std::vector<T> snapshot = data;
  const SliceView<T> view{data.data(), data.size()};

  RunResult r;
  const auto t0 = std::chrono::steady_clock::now();
  if (algo == Algo::small_sort) {
    small_sort(backend, view, skip_opt);
  } else if (algo == Algo::qs) {
    sort(backend, view, config);
  } else if (algo == Algo::qs_par) {
    parallel_sort(backend, view, config);
  } else if (algo == Algo::baseline_std) {
    std::sort(data.begin(), data.end());
  } else {  // partition
    if (n > 0) {
      const T pivot = select_pivot(backend, view, Interval{0, n});
      const PartitionResult pr =
          partition_in_place(backend, view, Interval{0, n}, pivot);
      r.verified = true;
      for (std::size_t i = 0; i < pr.boundary; ++i) {
        if (element_traits<T>::less(pivot, data[i])) r.verified = false;
      }
      for (std::size_t i = pr.boundary; i < n; ++i) {
        if (!element_traits<T>::less(pivot, data[i])) r.verified = false;
      }
    } else {
      r.verified = true;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  r.ns_per_element_over_nlogn = time_metric(t1 - t0, n);
  r.bytes_read = traffic.read();
  r.bytes_written = traffic.written();

  if (algo == Algo::partition) {
    std::vector<T> a = data;
    std::vector<T> s = snapshot;
    std::sort(a.begin(), a.end());
    std::sort(s.begin(), s.end());
    r.verified = r.verified && a == s;
  } else {
    std::vector<T> s = snapshot;
    std::sort(s.begin(), s.end());
    r.verified = data == s;  // implies sortedness and multiset equality
  }
  return r;
}

// Key/value iteration; payloads start as the element's original position.
inline RunResult run_kv(Algo algo, ElementKind kind, std::size_t n,
                        std::size_t width, std::size_t workers,
                        std::uint64_t seed, bool count_traffic, bool skip_opt,
                        InputKind input) {
  TrafficCounter traffic;
  VectorBackend<KeyValue> backend(width, count_traffic ? &traffic : nullptr);
  SortConfig config;
  config.workers = workers;
  config.enable_skip_optimizations = skip_opt;

  const std::vector<std::int32_t> keys =
      generate_input<std::int32_t>(input, n, seed);
  std::vector<KeyValue> snapshot(n);
  for (std::size_t i = 0; i < n; ++i) {
    snapshot[i] = {keys[i], static_cast<std::int32_t>(i)};
  }

  std::vector<KeyValue> aos;
  std::vector<std::int32_t> soa_keys;
  std::vector<std::int32_t> soa_payloads;
  KvAosView aos_view;
  KvSoaView soa_view;
  if (kind == ElementKind::kv_aos) {
    aos = snapshot;
    aos_view = {aos.data(), aos.size()};
  } else {
    soa_keys = keys;
    soa_payloads.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      soa_payloads[i] = static_cast<std::int32_t>(i);
    }
    soa_view = {soa_keys.data(), soa_payloads.data(), n};
  }

  const auto run_view = [&](const auto& view, RunResult& r) {
    if (algo == Algo::small_sort) {
      small_sort(backend, view, skip_opt);
    } else if (algo == Algo::qs) {
      sort(backend, view, config);
    } else if (algo == Algo::qs_par) {
      parallel_sort(backend, view, config);
    } else if (algo == Algo::partition) {
      if (n > 0) {
        const KeyValue pivot = select_pivot(backend, view, Interval{0, n});
        const PartitionResult pr =
            partition_in_place_kv(backend, view, Interval{0, n}, pivot);
        r.verified = true;
        for (std::size_t i = 0; i < n; ++i) {
          const bool le = !element_traits<KeyValue>::less(pivot, view.get(i));
          if (i < pr.boundary ? !le : le) r.verified = false;
        }
      } else {
        r.verified = true;
      }
    }
  };

  RunResult r;
  const auto t0 = std::chrono::steady_clock::now();
  if (algo == Algo::baseline_std) {
    std::vector<KeyValue> zipped = snapshot;
    std::sort(zipped.begin(), zipped.end(),
              [](const KeyValue& a, const KeyValue& c) { return a.key < c.key; });
    if (kind == ElementKind::kv_aos) {
      aos = std::move(zipped);
      aos_view = {aos.data(), aos.size()};
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        soa_keys[i] = zipped[i].key;
        soa_payloads[i] = zipped[i].payload;
      }
    }
  } else if (kind == ElementKind::kv_aos) {
    run_view(aos_view, r);
  } else {
    run_view(soa_view, r);
  }
  const auto t1 = std::chrono::steady_clock::now();
  r.ns_per_element_over_nlogn = time_metric(t1 - t0, n);
  r.bytes_read = traffic.read();
  r.bytes_written = traffic.written();

  std::vector<KeyValue> result(n);
  for (std::size_t i = 0; i < n; ++i) {
    result[i] =
        kind == ElementKind::kv_aos ? aos_view.get(i) : soa_view.get(i);
  }
  if (algo == Algo::partition) {
    std::vector<KeyValue> a = result;
    std::vector<KeyValue> s = snapshot;
    std::sort(a.begin(), a.end(), lt_kv_lex);
    std::sort(s.begin(), s.end(), lt_kv_lex);
    r.verified = r.verified && a == s;
  } else {
    bool ok = true;
    for (std::size_t i = 1; i < n; ++i) {  // non-decreasing keys
      if (result[i].key < result[i - 1].key) ok = false;
    }
    std::vector<KeyValue> a = result;
    std::vector<KeyValue> s = snapshot;
    std::sort(a.begin(), a.end(), lt_kv_lex);
    std::sort(s.begin(), s.end(), lt_kv_lex);
    r.verified = ok && a == s;
  }
  return r;
}

}  // namespace detail

inline RunResult run_once(Algo algo, ElementKind kind, std::size_t n,
                          std::size_t width, std::size_t workers,
                          std::uint64_t seed, bool count_traffic,
                          bool skip_opt,
                          InputKind input = InputKind::uniform) {
  switch (kind) {
    case ElementKind::i32:
      return detail::run_scalar<std::int32_t>(algo, n, width, workers, seed,
                                              count_traffic, skip_opt, input);
    case ElementKind::f64:
      return detail::run_scalar<double>(algo, n, width, workers, seed,
                                        count_traffic, skip_opt, input);
    default:
      return detail::run_kv(algo, kind, n, width, workers, seed, count_traffic,
                            skip_opt, input);
  }
}

struct BenchOptions {
  Algo algo = Algo::qs;
  ElementKind kind = ElementKind::i32;
  std::vector<std::size_t> sizes;  // empty: default sweep for the algo
  std::size_t reps = 3;
  std::size_t width = 16;
  std::size_t workers = 1;
  std::uint64_t seed = 1;
  bool count_traffic = false;
  bool enable_skip_opt = false;
};

// "lo:hi:xSTEP" geometric, "lo:hi:+STEP" additive, or a single size.
inline std::vector<std::size_t> parse_sizes(const std::string& text) {
  const auto first = text.find(':');
  if (first == std::string::npos) {
    return {static_cast<std::size_t>(std::stoull(text))};
  }
  const auto second = text.find(':', first + 1);
  if (second == std::string::npos || second + 1 >= text.size()) {
    throw std::invalid_argument("sizes must be lo:hi:xSTEP, lo:hi:+STEP or N");
  }
  const std::size_t lo = std::stoull(text.substr(0, first));
  const std::size_t hi = std::stoull(text.substr(first + 1, second - first - 1));
  const char mode = text[second + 1];
  const std::size_t step = std::stoull(text.substr(second + 2));
  if ((mode != 'x' && mode != '+') || lo > hi ||
      (mode == 'x' && step < 2) || (mode == '+' && step < 1)) {
    throw std::invalid_argument("sizes must be lo:hi:xSTEP, lo:hi:+STEP or N");
  }
  std::vector<std::size_t> sizes;
  for (std::size_t n = lo; n <= hi;) {
    sizes.push_back(n);
    n = mode == 'x' ? n * step : n + step;
  }
  return sizes;
}

// Default width resolution for the CLI: flag value if given, else the
// VEXSORT_WIDTH environment variable, else 16.
inline std::size_t resolve_width(std::size_t flag_value) {
  if (flag_value != 0) return flag_value;
  if (const char* env = std::getenv("VEXSORT_WIDTH")) {
    const unsigned long v = std::strtoul(env, nullptr, 10);
    if (v < 2 || v > kMaxLanes || (v & (v - 1)) != 0) {
      throw std::invalid_argument(
          "VEXSORT_WIDTH must be a power of two in [2, 256]");
    }
    return static_cast<std::size_t>(v);
  }
  return 16;
}

// One CSV row per (algo, kind, n): medians over the repetitions, verified is
// the conjunction. Returns nonzero if any repetition failed verification.
inline int run_suite(const BenchOptions& opt, std::ostream& out,
                     std::ostream& err) {
  if (opt.width < 2 || opt.width > kMaxLanes ||
      (opt.width & (opt.width - 1)) != 0) {
    err << "vector width must be a power of two in [2, 256]\n";
    return 2;
  }
  if (opt.workers < 1) {
    err << "workers must be >= 1\n";
    return 2;
  }
  std::vector<std::size_t> sizes = opt.sizes;
  if (sizes.empty()) {
    if (opt.algo == Algo::small_sort) {
      for (std::size_t n = 1; n <= kMaxSmallSortVectors * opt.width; ++n) {
        sizes.push_back(n);
      }
    } else {
      sizes = parse_sizes("64:1048576:x8");
    }
  }
  if (opt.algo == Algo::small_sort) {
    for (std::size_t n : sizes) {
      if (n > kMaxSmallSortVectors * opt.width) {
        err << "small-sort sizes are limited to 16 vectors ("
            << kMaxSmallSortVectors * opt.width << " elements)\n";
        return 2;
      }
    }
  }

  const auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
  };

  out << "algo,element_kind,n,width,workers,seed,"
         "ns_per_element_over_nlogn,bytes_read,bytes_written,verified\n";
  bool all_ok = true;
  for (std::size_t n : sizes) {
    std::vector<double> times;
    std::vector<double> reads;
    std::vector<double> writes;
    bool ok = true;
    for (std::size_t rep = 0; rep < opt.reps; ++rep) {
      const RunResult r =
          run_once(opt.algo, opt.kind, n, opt.width, opt.workers,
                   opt.seed + 0x9E3779B97F4A7C15ULL * rep, opt.count_traffic,
                   opt.enable_skip_opt);
      times.push_back(r.ns_per_element_over_nlogn);
      reads.push_back(static_cast<double>(r.bytes_read));
      writes.push_back(static_cast<double>(r.bytes_written));
      ok = ok && r.verified;
    }
    all_ok = all_ok && ok;
    out << algo_name(opt.algo) << ',' << element_kind_name(opt.kind) << ','
        << n << ',' << opt.width << ',' << opt.workers << ',' << opt.seed
        << ',' << median(times) << ','
        << static_cast<std::uint64_t>(median(reads)) << ','
        << static_cast<std::uint64_t>(median(writes)) << ','
        << (ok ? "true" : "false") << '\n';
    if (!ok) {
      err << "verification failed: algo=" << algo_name(opt.algo)
          << " n=" << n << '\n';
    }
  }
  return all_ok ? 0 : 1;
}

}  // namespace vexsort::bench
