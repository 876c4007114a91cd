#include "etfad/workloads.hpp"

namespace etfad {

namespace {

template <Strategy S>
std::vector<Fad<S>> independents(std::span<const double> values) {
  std::vector<Fad<S>> x;
  x.reserve(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) x.push_back(make_independent<S>(values[j], j, values.size()));
  return x;
}

template <Strategy S>
WorkloadResult to_result(const Fad<S>& y) {
  return {y.val(), std::vector<double>(y.dx().begin(), y.dx().end())};
}

}  // namespace

WorkloadResult evaluate_mult(Strategy s, std::size_t m, std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("product needs at least one independent variable");
  WorkloadResult r;
  with_strategy(s, [&](auto sc) {
    constexpr Strategy S = decltype(sc)::value;
    const auto x = independents<S>(values);
    with_static_m(m, [&](auto mc) {
      Fad<S> y;
      y = product<decltype(mc)::value>(std::span<const Fad<S>>(x));
      r = to_result(y);
    });
  });
  return r;
}

WorkloadResult evaluate_nested(Strategy s, std::size_t m, double x0, std::size_t n) {
  if (n == 0) throw std::invalid_argument("need at least one independent variable");
  WorkloadResult r;
  with_strategy(s, [&](auto sc) {
    constexpr Strategy S = decltype(sc)::value;
    const auto x = make_independent<S>(x0, 0, n);
    with_static_m(m, [&](auto mc) {
      Fad<S> y;
      y = nested_sine<decltype(mc)::value>(x);
      r = to_result(y);
    });
  });
  return r;
}

}  // namespace etfad
