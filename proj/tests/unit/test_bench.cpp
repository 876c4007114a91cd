#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "etfad/bench.hpp"
#include "etfad/etfad.hpp"
#include "etfad/kernel.hpp"
#include "etfad/oracle.hpp"
#include "etfad/workloads.hpp"
#include "support/check.hpp"

namespace {

using etfad::Strategy;
using etfad::bench::BenchOptions;
using etfad::bench::BenchRecord;
using etfad::bench::Workload;
using etfad::testing::compare_vectors;
using etfad::testing::rel_close;

BenchOptions quick() {
  BenchOptions o;
  o.timing.min_batch_seconds = 1e-4;
  o.timing.warmup_batches = 1;
  o.timing.samples = 3;
  o.count_transcendentals = true;
  return o;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

BenchRecord sample_record(std::size_t i) {
  BenchRecord r;
  r.workload = i % 2 ? Workload::nested : Workload::mult;
  r.strategy = etfad::kAllStrategies[i % 5];
  r.m = 1 + i;
  r.n = 5;
  r.t_deriv = 1e-7 * static_cast<double>(i + 1);
  r.t_base = 3e-8;
  r.scaled_time = etfad::bench::scaled_time(r.t_deriv, r.t_base, r.n);
  r.transcendental_count = i;
  return r;
}

TEST(Csv, OneRecord) {
  std::ostringstream os;
  const std::vector<BenchRecord> recs{sample_record(0)};
  etfad::bench::write_csv(recs, os);
  const auto lines = lines_of(os.str());
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], etfad::bench::kCsvHeader);
  EXPECT_EQ(lines[1].rfind("mult,eager,1,5,", 0), 0u);
}

TEST(Csv, EmptyIsPreconditionError) {
  std::ostringstream os;
  EXPECT_THROW(etfad::bench::write_csv({}, os), std::invalid_argument);
  EXPECT_THROW(etfad::bench::emit_csv({}, "unused.csv"), std::invalid_argument);
}

TEST(Csv, EightyRecordsToFileInOrder) {
  std::vector<BenchRecord> recs;
  for (std::size_t i = 0; i < 80; ++i) recs.push_back(sample_record(i));
  const auto path = std::filesystem::temp_directory_path() / "etfad_test_csv.csv";
  etfad::bench::emit_csv(recs, path);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  const auto lines = lines_of(ss.str());
  ASSERT_EQ(lines.size(), 81u);
  for (std::size_t i = 0; i < 80; ++i) {
    std::istringstream row(lines[i + 1]);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    ASSERT_EQ(fields.size(), 8u);
    EXPECT_EQ(std::stoul(fields[2]), recs[i].m);
    // Full precision: every double round-trips exactly.
    EXPECT_EQ(std::stod(fields[4]), recs[i].t_deriv);
    EXPECT_EQ(std::stod(fields[6]), recs[i].scaled_time);
  }
  std::filesystem::remove(path);
}

TEST(Csv, UnwritablePathIsIoError) {
  const std::vector<BenchRecord> recs{sample_record(0)};
  EXPECT_THROW(etfad::bench::emit_csv(recs, "/nonexistent-dir/x/out.csv"), etfad::IoError);
}

TEST(Names, RoundTrip) {
  for (Workload w : {Workload::mult, Workload::nested, Workload::kernel}) {
    EXPECT_EQ(etfad::bench::parse_workload(etfad::bench::to_string(w)), w);
  }
  EXPECT_THROW(etfad::bench::parse_workload("matmul"), std::invalid_argument);
  for (Strategy s : etfad::kAllStrategies) EXPECT_EQ(etfad::parse_strategy(etfad::to_string(s)), s);
  EXPECT_FALSE(etfad::parse_strategy("fast").has_value());
}

TEST(Timing, ResolutionErrorWhenBatchCapped) {
  etfad::bench::TimingOptions t;
  t.min_batch_seconds = 1.0;
  t.max_batch = 4;
  EXPECT_THROW(etfad::bench::time_median([] {}, t), etfad::TimerResolutionError);
}

TEST(Timing, MedianOfSamples) {
  etfad::bench::TimingOptions t;
  t.min_batch_seconds = 1e-4;
  t.warmup_batches = 1;
  t.samples = 5;
  volatile double sink = 0.0;
  const auto r = etfad::bench::time_median([&] { sink = sink + 1.0; }, t);
  EXPECT_GT(r.seconds_per_call, 0.0);
  EXPECT_GE(r.batch, 1u);
}

TEST(MultBench, EagerSingleFactorSmoke) {
  const auto out = etfad::bench::run_mult_bench(Strategy::eager, 1, 1, quick());
  EXPECT_GT(out.record.scaled_time, 0.0);
  EXPECT_EQ(out.record.scaled_time, out.record.t_deriv / (out.record.t_base * 1.0));
  const auto x = etfad::bench::sample_inputs(1, quick().seed);
  const auto ref = etfad::oracle::analytic_gradient_mult(x);
  EXPECT_EQ(out.value, ref.value);
  EXPECT_EQ(out.gradient, ref.gradient);
}

TEST(MultBench, CachedHasNoTranscendentals) {
  const auto c = etfad::bench::run_mult_bench(Strategy::cached, 20, 50, quick());
  EXPECT_EQ(c.record.transcendental_count, 0u);
  EXPECT_EQ(c.record.workload, Workload::mult);
  EXPECT_EQ(c.record.m, 20u);
  EXPECT_EQ(c.record.n, 50u);
}

TEST(MultBench, CachedElrGradientMatchesOracle) {
  const auto c = etfad::bench::run_mult_bench(Strategy::cached_elr, 20, 50, quick());
  const auto v = etfad::bench::sample_inputs(50, quick().seed);
  // Factor i is variable i mod 50, so for M = 20 only the first 20 appear.
  const std::vector<double> factors(v.begin(), v.begin() + 20);
  const auto ref = etfad::oracle::analytic_gradient_mult(factors);
  std::vector<double> expected(50, 0.0);
  std::copy(ref.gradient.begin(), ref.gradient.end(), expected.begin());
  EXPECT_TRUE(rel_close(c.value, ref.value, 1e-12));
  EXPECT_EQ(compare_vectors(c.gradient, expected, 1e-12), "");
}

TEST(MultBench, RepeatedFactorsFollowModuloRule) {
  const std::vector<double> v{1.5, 0.5, 1.25};
  const auto r = etfad::evaluate_mult(Strategy::elr, 5, v);  // x0 x1 x2 x0 x1
  EXPECT_TRUE(rel_close(r.value, 1.5 * 0.5 * 1.25 * 1.5 * 0.5, 1e-15));
  EXPECT_TRUE(rel_close(r.gradient[0], 2 * 1.5 * 0.5 * 1.25 * 0.5, 1e-15));
  EXPECT_TRUE(rel_close(r.gradient[1], 2 * 0.5 * 1.5 * 1.25 * 1.5, 1e-15));
  EXPECT_TRUE(rel_close(r.gradient[2], 1.5 * 0.5 * 1.5 * 0.5, 1e-15));
}

TEST(NestedBench, CountsScaleOnlyForStandard) {
  auto count = [](Strategy s, std::size_t n) {
    return etfad::bench::run_nested_bench(s, 10, n, quick()).record.transcendental_count;
  };
  EXPECT_GE(count(Strategy::standard, 50), 5 * count(Strategy::standard, 5));
  EXPECT_EQ(count(Strategy::cached, 5), count(Strategy::cached, 50));
}

TEST(NestedBench, DerivativeAtZeroIsOne) {
  for (Strategy s : etfad::kAllStrategies) {
    const auto r = etfad::evaluate_nested(s, 1, 0.0, 1);
    EXPECT_NEAR(r.gradient[0], 1.0, 1e-15);
  }
}

TEST(NestedBench, RecordsMatchOracle) {
  const auto out = etfad::bench::run_nested_bench(Strategy::elr, 15, 5, quick());
  const double x = etfad::bench::sample_inputs(1, quick().seed)[0];
  const auto [v, d] = etfad::oracle::analytic_gradient_nested(x, 15);
  EXPECT_TRUE(rel_close(out.value, v, 1e-12));
  EXPECT_TRUE(rel_close(out.gradient[0], d, 1e-12));
  for (std::size_t i = 1; i < 5; ++i) EXPECT_EQ(out.gradient[i], 0.0);
}

TEST(BenchArgs, Rejected) {
  EXPECT_THROW(etfad::bench::run_mult_bench(Strategy::eager, 0, 5, quick()), std::invalid_argument);
  EXPECT_THROW(etfad::bench::run_mult_bench(Strategy::eager, 5, 0, quick()), std::invalid_argument);
  EXPECT_THROW(etfad::bench::run_nested_bench(Strategy::eager, 99, 5, quick()), std::out_of_range);
}

TEST(Kernel, SpecValidation) {
  etfad::KernelSpec spec;
  EXPECT_NO_THROW(spec.validate());
  EXPECT_EQ(spec.n_nodes(), 8u);
  spec.n_unknowns = 81;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec = etfad::KernelSpec{};
  spec.reactions.pop_back();
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(Kernel, EagerAndCachedElrJacobiansAgree) {
  const etfad::KernelSpec spec;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto x = etfad::sample_kernel_state(spec, s);
    const auto a = etfad::evaluate_kernel_jacobian(Strategy::eager, spec, x);
    const auto b = etfad::evaluate_kernel_jacobian(Strategy::cached_elr, spec, x);
    EXPECT_EQ(compare_vectors(a.residual, b.residual, 1e-11), "") << "state " << s;
    EXPECT_EQ(compare_vectors(a.jacobian, b.jacobian, 1e-11), "") << "state " << s;
  }
}

TEST(Kernel, AllStrategiesAgree) {
  const etfad::KernelSpec spec;
  const auto x = etfad::sample_kernel_state(spec, 99);
  const auto ref = etfad::evaluate_kernel_jacobian(Strategy::eager, spec, x);
  for (Strategy s : etfad::kAllStrategies) {
    const auto j = etfad::evaluate_kernel_jacobian(s, spec, x);
    EXPECT_EQ(compare_vectors(j.jacobian, ref.jacobian, 1e-11), "") << etfad::to_string(s);
    EXPECT_EQ(j.residual, etfad::kernel_residual(spec, x)) << etfad::to_string(s);
  }
}

TEST(Kernel, JacobianMatchesFiniteDifferences) {
  const etfad::KernelSpec spec;
  const auto x = etfad::sample_kernel_state(spec, 5);
  const auto jac = etfad::evaluate_kernel_jacobian(Strategy::cached_elr, spec, x);
  for (std::size_t row : {0u, 5u, 6u, 9u, 47u, 79u}) {
    const etfad::oracle::ScalarFunction f = [&](std::span<const double> v) {
      return etfad::kernel_residual(spec, v)[row];
    };
    const auto g = etfad::oracle::finite_difference_gradient(f, x);
    for (std::size_t col = 0; col < x.size(); ++col) {
      EXPECT_NEAR(jac(row, col), g[col], 1e-6 * std::max(1.0, std::abs(g[col]))) << row << "," << col;
    }
  }
}

TEST(Kernel, ZeroRatesDecoupleSpecies) {
  etfad::KernelSpec spec;
  for (auto& r : spec.reactions) r.pre_exponential = 0.0;
  const auto x = etfad::sample_kernel_state(spec, 3);
  const auto jac = etfad::evaluate_kernel_jacobian(Strategy::cached_elr, spec, x);
  for (std::size_t q = 0; q < spec.n_nodes(); ++q) {
    for (std::size_t p = 0; p < spec.n_nodes(); ++p) {
      for (std::size_t s = 0; s < spec.n_species; ++s) {
        for (std::size_t t = 0; t < spec.n_species; ++t) {
          if (s == t) continue;
          EXPECT_EQ(jac(spec.index(q, s), spec.index(p, t)), 0.0);
        }
      }
      // Temperature no longer sees species.
      for (std::size_t t = 0; t < spec.n_species; ++t) {
        EXPECT_EQ(jac(spec.index(q, spec.temperature_field()), spec.index(p, t)), 0.0);
      }
    }
  }
  // Pure transport still couples a species to its neighbours.
  EXPECT_NE(jac(spec.index(1, 0), spec.index(0, 0)), 0.0);
}

TEST(Kernel, SpeciesResidualIsLazy) {
  const etfad::KernelSpec spec;
  using F = etfad::Fad<Strategy::cached_elr>;
  const auto state = etfad::sample_kernel_state(spec, 1);
  std::vector<F> x;
  for (std::size_t j = 0; j < state.size(); ++j) x.push_back(F::independent(state[j], j, state.size()));
  etfad::KernelScratch<F> w;
  std::vector<F> r(spec.n_unknowns);
  etfad::kernel_residual<F>(spec, x, w, r);
  etfad::CountingScope scope;
  const auto e = etfad::species_residual<F>(spec, x, w, 2, 1);
  EXPECT_EQ(scope.count(), 0u);
  F y;
  y = e;
  EXPECT_EQ(scope.count(), 2u);  // two Arrhenius exponentials
  EXPECT_EQ(y.val(), r[spec.index(2, 1)].val());
}

TEST(Kernel, NonFiniteStateRejected) {
  etfad::KernelSpec spec;
  spec.reactions[0].activation_temperature = -1e6;  // exp overflows
  EXPECT_THROW(etfad::sample_kernel_state(spec, 0), etfad::StateSamplingError);
}

TEST(KernelBench, RecordShape) {
  const auto out = etfad::bench::run_kernel_bench(Strategy::cached_elr, etfad::KernelSpec{}, quick());
  EXPECT_EQ(out.record.workload, Workload::kernel);
  EXPECT_EQ(out.record.n, 80u);
  EXPECT_EQ(out.record.m, 8u);
  EXPECT_GT(out.record.t_deriv, 0.0);
  EXPECT_GT(out.record.t_base, 0.0);
  EXPECT_EQ(out.record.scaled_time, out.record.t_deriv / (out.record.t_base * 80.0));
  EXPECT_GT(out.record.transcendental_count, 0u);
}

}  // namespace
