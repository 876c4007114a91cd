#include "etfad/kernel.hpp"

#include <random>
#include <stdexcept>
#include <string>

#include "etfad/errors.hpp"
#include "etfad/etfad.hpp"
#include "etfad/workloads.hpp"

namespace etfad {

void KernelSpec::validate() const {
  if (n_species < 2) throw std::invalid_argument("kernel needs at least two species");
  if (n_unknowns == 0 || n_unknowns % n_fields() != 0) {
    throw std::invalid_argument("n_unknowns (" + std::to_string(n_unknowns) + ") must be a positive multiple of " +
                                std::to_string(n_fields()) + " fields per node");
  }
  if (n_nodes() < 3) throw std::invalid_argument("kernel stencil needs at least 3 nodes");
  if (reactions.size() != n_species - 1) {
    throw std::invalid_argument("expected " + std::to_string(n_species - 1) + " reactions, got " +
                                std::to_string(reactions.size()));
  }
  if (!(spacing > 0.0) || !(gas_constant > 0.0) || !(reference_temperature > 0.0)) {
    throw std::invalid_argument("spacing, gas constant and reference temperature must be positive");
  }
}

std::vector<double> kernel_residual(const KernelSpec& spec, std::span<const double> state) {
  spec.validate();
  if (state.size() != spec.n_unknowns) throw SizeMismatchError("state length does not match n_unknowns");
  KernelScratch<double> w;
  std::vector<double> r(spec.n_unknowns);
  kernel_residual<double>(spec, state, w, r);
  return r;
}

namespace {

template <Strategy S>
KernelJacobian jacobian_impl(const KernelSpec& spec, std::span<const double> state) {
  const std::size_t n = spec.n_unknowns;
  std::vector<Fad<S>> x;
  x.reserve(n);
  for (std::size_t j = 0; j < n; ++j) x.push_back(make_independent<S>(state[j], j, n));
  KernelScratch<Fad<S>> w;
  std::vector<Fad<S>> r(n);
  kernel_residual<Fad<S>>(spec, x, w, r);

  KernelJacobian out;
  out.n = n;
  out.residual.resize(n);
  out.jacobian.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.residual[i] = r[i].val();
    for (std::size_t j = 0; j < r[i].size(); ++j) out.jacobian[i * n + j] = r[i].dx(j);
  }
  return out;
}

}  // namespace

KernelJacobian evaluate_kernel_jacobian(Strategy s, const KernelSpec& spec, std::span<const double> state) {
  spec.validate();
  if (state.size() != spec.n_unknowns) throw SizeMismatchError("state length does not match n_unknowns");
  KernelJacobian out;
  with_strategy(s, [&](auto sc) { out = jacobian_impl<decltype(sc)::value>(spec, state); });
  return out;
}

std::vector<double> sample_kernel_state(const KernelSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> species(0.1, 1.0);
  std::uniform_real_distribution<double> temperature(900.0, 1100.0);
  std::uniform_real_distribution<double> velocity(-1.0, 1.0);
  std::uniform_real_distribution<double> pressure(0.8, 1.2);

  std::vector<double> x(spec.n_unknowns);
  for (std::size_t q = 0; q < spec.n_nodes(); ++q) {
    for (std::size_t s = 0; s < spec.n_species; ++s) x[spec.index(q, s)] = species(rng);
    x[spec.index(q, spec.temperature_field())] = temperature(rng);
    for (std::size_t k = 0; k < 3; ++k) x[spec.index(q, spec.velocity_field(k))] = velocity(rng);
    x[spec.index(q, spec.pressure_field())] = pressure(rng);
  }
  for (double r : kernel_residual(spec, x)) {
    if (!std::isfinite(r)) throw StateSamplingError("sampled kernel state gives a non-finite residual");
  }
  return x;
}

}  // namespace etfad
