#include "etfad/bench.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <random>
#include <stdexcept>

#include "etfad/etfad.hpp"
#include "etfad/instrument.hpp"
#include "etfad/workloads.hpp"

namespace etfad::bench {

std::string_view to_string(Workload w) noexcept {
  switch (w) {
    case Workload::mult: return "mult";
    case Workload::nested: return "nested";
    case Workload::kernel: return "kernel";
  }
  return "?";
}

Workload parse_workload(std::string_view name) {
  for (Workload w : {Workload::mult, Workload::nested, Workload::kernel}) {
    if (name == to_string(w)) return w;
  }
  throw std::invalid_argument("unknown workload '" + std::string(name) + "'");
}

double scaled_time(double t_deriv, double t_base, std::size_t n) noexcept {
  return t_deriv / (t_base * static_cast<double>(n));
}

namespace detail {

TimingResult median_of(std::vector<double>& v, std::size_t batch) {
  if (v.empty()) throw std::invalid_argument("timing needs at least one sample");
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  const double med = v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
  return {med, batch};
}

}  // namespace detail

std::vector<double> sample_inputs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

namespace {

void check_sizes(std::size_t m, std::size_t n, const BenchOptions& opt) {
  if (m == 0 || n == 0) throw std::invalid_argument("M and N must be positive");
  if (opt.timing.samples == 0) throw std::invalid_argument("reps must be positive");
}

template <Strategy S>
std::vector<Fad<S>> seed_all(std::span<const double> values) {
  std::vector<Fad<S>> x;
  x.reserve(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) x.push_back(make_independent<S>(values[j], j, values.size()));
  return x;
}

// Times `deriv` (writes into y) and `base` (returns a double), optionally
// counts one instrumented derivative call, and fills the outcome.
template <class Deriv, class Base, class Result>
BenchOutcome measure(BenchRecord rec, const BenchOptions& opt, Deriv&& deriv, Base&& base, Result&& result) {
  BenchOutcome out;
  double sum = 0.0;
  const TimingResult td = time_median(
      [&] {
        sum += deriv();
      },
      opt.timing);
  const TimingResult tb = time_median(
      [&] {
        sum += base();
      },
      opt.timing);
  if (opt.count_transcendentals) {
    CountingScope scope;
    sum += deriv();
    rec.transcendental_count = scope.count();
  }
  rec.t_deriv = td.seconds_per_call;
  rec.t_base = tb.seconds_per_call;
  if (!(rec.t_deriv > 0.0) || !(rec.t_base > 0.0)) {
    throw TimerResolutionError("measured a non-positive time per call");
  }
  rec.scaled_time = scaled_time(rec.t_deriv, rec.t_base, rec.n);
  out.record = rec;
  result(out);
  out.checksum = sum;
  return out;
}

template <Strategy S>
void fill_result(BenchOutcome& out, const Fad<S>& y) {
  out.value = y.val();
  out.gradient.assign(y.dx().begin(), y.dx().end());
}

template <Strategy S, std::size_t M>
BenchOutcome mult_impl(std::size_t n, const BenchOptions& opt) {
  const std::vector<double> values = sample_inputs(n, opt.seed);
  const std::vector<Fad<S>> x = seed_all<S>(values);
  const std::span<const Fad<S>> xs(x);
  const std::span<const double> vs(values);
  bench::detail::do_not_optimize(values.data());
  bench::detail::do_not_optimize(x.data());
  Fad<S> y;
  double yb = 0.0;
  return measure(
      {Workload::mult, S, M, n}, opt,
      [&] {
        y = product<M>(xs);
        bench::detail::do_not_optimize(y.dx().data());
        return y.val() + y.fast_dx(n - 1);
      },
      [&] {
        yb = product<M>(vs);
        bench::detail::do_not_optimize(yb);
        return yb;
      },
      [&](BenchOutcome& o) {
        y = product<M>(xs);
        fill_result<S>(o, y);
      });
}

template <Strategy S, std::size_t M>
BenchOutcome nested_impl(std::size_t n, const BenchOptions& opt) {
  const std::vector<double> values = sample_inputs(1, opt.seed);
  const Fad<S> x = make_independent<S>(values[0], 0, n);
  const std::vector<double> xb(1, values[0]);
  bench::detail::do_not_optimize(&x);
  bench::detail::do_not_optimize(xb.data());
  Fad<S> y;
  double yb = 0.0;
  return measure(
      {Workload::nested, S, M, n}, opt,
      [&] {
        y = nested_sine<M>(x);
        bench::detail::do_not_optimize(y.dx().data());
        return y.val() + y.fast_dx(0);
      },
      [&] {
        yb = nested_sine<M>(xb[0]);
        bench::detail::do_not_optimize(yb);
        return yb;
      },
      [&](BenchOutcome& o) {
        y = nested_sine<M>(x);
        fill_result<S>(o, y);
      });
}

template <Strategy S>
BenchOutcome kernel_impl(const KernelSpec& spec, const BenchOptions& opt) {
  const std::size_t n = spec.n_unknowns;
  const std::vector<double> state = sample_kernel_state(spec, opt.seed);
  const std::vector<Fad<S>> x = seed_all<S>(state);
  KernelScratch<Fad<S>> w;
  std::vector<Fad<S>> r(n);
  KernelScratch<double> wb;
  std::vector<double> rb(n);
  bench::detail::do_not_optimize(state.data());
  bench::detail::do_not_optimize(x.data());
  const std::size_t nodes = spec.n_nodes();
  return measure(
      {Workload::kernel, S, nodes, n}, opt,
      [&] {
        kernel_residual<Fad<S>>(spec, x, w, r);
        bench::detail::do_not_optimize(r.data());
        return r[0].val() + r[n - 1].fast_dx(n - 1);
      },
      [&] {
        kernel_residual<double>(spec, state, wb, rb);
        bench::detail::do_not_optimize(rb.data());
        return rb[0];
      },
      [&](BenchOutcome& o) {
        kernel_residual<Fad<S>>(spec, x, w, r);
        fill_result<S>(o, r[0]);
      });
}

}  // namespace

BenchOutcome run_mult_bench(Strategy s, std::size_t m, std::size_t n, const BenchOptions& opt) {
  check_sizes(m, n, opt);
  BenchOutcome out;
  with_strategy(s, [&](auto sc) {
    with_static_m(m, [&](auto mc) { out = mult_impl<decltype(sc)::value, decltype(mc)::value>(n, opt); });
  });
  return out;
}

BenchOutcome run_nested_bench(Strategy s, std::size_t m, std::size_t n, const BenchOptions& opt) {
  check_sizes(m, n, opt);
  BenchOutcome out;
  with_strategy(s, [&](auto sc) {
    with_static_m(m, [&](auto mc) { out = nested_impl<decltype(sc)::value, decltype(mc)::value>(n, opt); });
  });
  return out;
}

BenchOutcome run_kernel_bench(Strategy s, const KernelSpec& spec, const BenchOptions& opt) {
  spec.validate();
  check_sizes(1, spec.n_unknowns, opt);
  BenchOutcome out;
  with_strategy(s, [&](auto sc) { out = kernel_impl<decltype(sc)::value>(spec, opt); });
  return out;
}

namespace {

void put_double(std::ostream& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

void write_csv(std::span<const BenchRecord> records, std::ostream& out) {
  if (records.empty()) throw std::invalid_argument("no benchmark records to write");
  out << kCsvHeader << '\n';
  for (const BenchRecord& r : records) {
    out << to_string(r.workload) << ',' << to_string(r.strategy) << ',' << r.m << ',' << r.n << ',';
    put_double(out, r.t_deriv);
    out << ',';
    put_double(out, r.t_base);
    out << ',';
    put_double(out, r.scaled_time);
    out << ',' << r.transcendental_count << '\n';
  }
}

void emit_csv(std::span<const BenchRecord> records, const std::filesystem::path& path) {
  if (records.empty()) throw std::invalid_argument("no benchmark records to write");
  std::ofstream f(path, std::ios::out | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(records, f);
  f.flush();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace etfad::bench
