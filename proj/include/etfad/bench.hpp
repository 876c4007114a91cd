#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etfad/errors.hpp"
#include "etfad/kernel.hpp"
#include "etfad/strategy.hpp"

namespace etfad::bench {

enum class Workload { mult, nested, kernel };

std::string_view to_string(Workload w) noexcept;
/// Throws std::invalid_argument for unknown names.
Workload parse_workload(std::string_view name);

struct BenchRecord {
  Workload workload = Workload::mult;
  Strategy strategy = Strategy::eager;
  std::size_t m = 0;
  std::size_t n = 0;
  double t_deriv = 0.0;  // seconds per derivative evaluation (median)
  double t_base = 0.0;   // seconds per plain evaluation (median)
  double scaled_time = 0.0;
  std::uint64_t transcendental_count = 0;
};

/// t_deriv / (t_base * n).
double scaled_time(double t_deriv, double t_base, std::size_t n) noexcept;

struct TimingOptions {
  double min_batch_seconds = 1e-3;
  std::size_t warmup_batches = 10;
  std::size_t samples = 30;
  /// Calibration gives up (TimerResolutionError) past this many calls per batch.
  std::size_t max_batch = std::size_t{1} << 28;
};

struct BenchOptions {
  TimingOptions timing{};
  /// Run one instrumented evaluation outside the timed loop and report its
  /// transcendental count; otherwise the count column is 0.
  bool count_transcendentals = false;
  std::uint64_t seed = 1;
};

struct BenchOutcome {
  BenchRecord record;
  double value = 0.0;             // first output
  std::vector<double> gradient;   // derivative of the first output
  double checksum = 0.0;          // folded results of every timed call
};

/// Median seconds per call of fn(); each timed sample batches enough calls to
/// last at least min_batch_seconds.
struct TimingResult {
  double seconds_per_call = 0.0;
  std::size_t batch = 0;
};

template <class Fn>
TimingResult time_median(Fn&& fn, const TimingOptions& opt);

/// Inputs: n values drawn from [0.5, 1.5] by `seed`.
std::vector<double> sample_inputs(std::size_t n, std::uint64_t seed);

BenchOutcome run_mult_bench(Strategy s, std::size_t m, std::size_t n, const BenchOptions& opt = {});
BenchOutcome run_nested_bench(Strategy s, std::size_t m, std::size_t n, const BenchOptions& opt = {});
BenchOutcome run_kernel_bench(Strategy s, const KernelSpec& spec, const BenchOptions& opt = {});

inline constexpr std::string_view kCsvHeader =
    "workload,strategy,M,N,t_deriv_s,t_base_s,scaled_time,transcendental_count";

/// Header plus one row per record, in input order, doubles in shortest
/// round-trip form. Throws std::invalid_argument if records is empty.
void write_csv(std::span<const BenchRecord> records, std::ostream& out);
/// As write_csv; throws IoError if the file cannot be written.
void emit_csv(std::span<const BenchRecord> records, const std::filesystem::path& path);

// ---------------------------------------------------------------------------

namespace detail {

template <class T>
inline void do_not_optimize(const T& v) {
  asm volatile("" : : "r,m"(v) : "memory");
}

inline void clobber_memory() { asm volatile("" : : : "memory"); }

TimingResult median_of(std::vector<double>& seconds_per_call, std::size_t batch);

}  // namespace detail

template <class Fn>
TimingResult time_median(Fn&& fn, const TimingOptions& opt) {
  using clock = std::chrono::steady_clock;
  auto run_batch = [&](std::size_t batch) {
    const auto t0 = clock::now();
    for (std::size_t i = 0; i < batch; ++i) {
      detail::clobber_memory();
      fn();
    }
    const auto t1 = clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
  };

  std::size_t batch = 1;
  for (;;) {
    const double t = run_batch(batch);
    if (t >= opt.min_batch_seconds) break;
    std::size_t next = batch * 2;
    if (t > 0.0) {
      const double want = 1.2 * opt.min_batch_seconds / t * static_cast<double>(batch);
      if (want > static_cast<double>(next)) next = want > static_cast<double>(opt.max_batch) ? opt.max_batch + 1
                                                                                              : static_cast<std::size_t>(want);
    }
    if (next > opt.max_batch) {
      throw TimerResolutionError("could not batch " + std::to_string(opt.max_batch) +
                                 " calls above the clock resolution");
    }
    batch = next;
  }

  for (std::size_t i = 0; i < opt.warmup_batches; ++i) run_batch(batch);
  std::vector<double> per_call;
  per_call.reserve(opt.samples);
  for (std::size_t i = 0; i < opt.samples; ++i) per_call.push_back(run_batch(batch) / static_cast<double>(batch));
  return detail::median_of(per_call, batch);
}

}  // namespace etfad::bench
