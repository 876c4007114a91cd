// Benchmark driver: sweeps workloads x strategies x M x N and writes CSV.

#include <sched.h>

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "etfad/bench.hpp"

namespace {

using etfad::Strategy;
using etfad::bench::Workload;

// Keeps the run on one logical core: the first one in the current mask.
void pin_to_one_core() {
  cpu_set_t mask;
  CPU_ZERO(&mask);
  if (sched_getaffinity(0, sizeof mask, &mask) != 0) {
    std::fprintf(stderr, "bench: could not read CPU affinity; running unpinned\n");
    return;
  }
  for (int cpu = 0; cpu < CPU_SETSIZE; ++cpu) {
    if (!CPU_ISSET(cpu, &mask)) continue;
    cpu_set_t one;
    CPU_ZERO(&one);
    CPU_SET(cpu, &one);
    if (sched_setaffinity(0, sizeof one, &one) != 0) {
      std::fprintf(stderr, "bench: could not pin to CPU %d; running unpinned\n", cpu);
    }
    return;
  }
}

std::vector<Workload> workloads_from(const std::vector<std::string>& names) {
  std::vector<Workload> out;
  for (const std::string& name : names) {
    if (name == "all") {
      out = {Workload::mult, Workload::nested, Workload::kernel};
      return out;
    }
    out.push_back(etfad::bench::parse_workload(name));
  }
  return out;
}

std::vector<Strategy> strategies_from(const std::vector<std::string>& names) {
  std::vector<Strategy> out;
  for (const std::string& name : names) {
    if (name == "all") return {etfad::kAllStrategies.begin(), etfad::kAllStrategies.end()};
    const auto s = etfad::parse_strategy(name);
    if (!s) throw CLI::ValidationError("--strategy", "unknown strategy '" + name + "'");
    out.push_back(*s);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivative propagation benchmarks; writes one CSV row per configuration."};

  std::vector<std::string> workload_names{"mult", "nested"};
  std::vector<std::string> strategy_names{"all"};
  std::vector<std::size_t> ms{1, 2, 3, 4, 5, 10, 15, 20};
  std::vector<std::size_t> ns{5, 50};
  std::size_t reps = 30;
  std::string out_path = "-";
  bool count = false;
  std::uint64_t seed = 1;

  app.add_option("--workload", workload_names, "mult, nested, kernel or all (comma list)")
      ->delimiter(',')
      ->check(CLI::IsMember({"mult", "nested", "kernel", "all"}))
      ->capture_default_str();
  app.add_option("--strategy", strategy_names, "eager, et, cet, elr, celr or all (comma list)")
      ->delimiter(',')
      ->check(CLI::IsMember({"eager", "et", "cet", "elr", "celr", "all"}))
      ->capture_default_str();
  app.add_option("--m", ms, "expression sizes M (comma list)")
      ->delimiter(',')
      ->check(CLI::Range(std::size_t{1}, std::size_t{24}))
      ->capture_default_str();
  app.add_option("--n", ns, "derivative components N (comma list)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--reps", reps, "timed samples per configuration")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", out_path, "CSV path, - for stdout")->capture_default_str();
  app.add_flag("--count-transcendentals", count, "record transcendental calls of one evaluation");
  app.add_option("--seed", seed, "input sampling seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const std::vector<Workload> workloads = workloads_from(workload_names);
    const std::vector<Strategy> strategies = strategies_from(strategy_names);

    pin_to_one_core();

    etfad::bench::BenchOptions opt;
    opt.timing.samples = reps;
    opt.count_transcendentals = count;
    opt.seed = seed;

    std::vector<etfad::bench::BenchRecord> records;
    double checksum = 0.0;
    for (Workload w : workloads) {
      for (Strategy s : strategies) {
        if (w == Workload::kernel) {
          const auto r = etfad::bench::run_kernel_bench(s, etfad::KernelSpec{}, opt);
          records.push_back(r.record);
          checksum += r.checksum;
          continue;
        }
        for (std::size_t m : ms) {
          for (std::size_t n : ns) {
            const auto r = w == Workload::mult ? etfad::bench::run_mult_bench(s, m, n, opt)
                                               : etfad::bench::run_nested_bench(s, m, n, opt);
            records.push_back(r.record);
            checksum += r.checksum;
          }
        }
      }
    }

    if (out_path == "-") {
      etfad::bench::write_csv(records, std::cout);
    } else {
      etfad::bench::emit_csv(records, out_path);
    }
    std::fprintf(stderr, "bench: %zu rows, checksum %.17g\n", records.size(), checksum);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bench: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
