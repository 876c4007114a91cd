#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "etfad/strategy.hpp"

namespace etfad {

/// One step of the decomposition chain c_s -> c_{s+1}, with rate
/// A * exp(-Ta / T) * c_s and heat release per unit rate.
struct ArrheniusParams {
  double pre_exponential = 0.0;
  double activation_temperature = 0.0;
  double heat_release = 0.0;
};

/// Synthetic reacting-flow element: n_species species, temperature, three
/// velocity components and pressure at each of n_unknowns / (n_species + 5)
/// nodes of a periodic 1-D stencil. Coefficients are made up; only the
/// structure (convection, diffusion, Arrhenius sources, one derivative
/// component per unknown) matters.
struct KernelSpec {
  std::size_t n_unknowns = 80;
  std::size_t n_species = 5;
  std::vector<ArrheniusParams> reactions{
      {2.0e3, 6000.0, 50.0}, {5.0e3, 8000.0, 40.0}, {1.0e4, 10000.0, 30.0}, {3.0e4, 12000.0, 20.0}};

  double diffusivity = 0.05;
  double conductivity = 0.08;
  double viscosity = 0.02;
  double gas_constant = 0.287;
  double heat_capacity = 1.0;
  double spacing = 0.125;
  double buoyancy = 0.01;
  double reference_temperature = 1000.0;

  std::size_t n_fields() const noexcept { return n_species + 5; }
  std::size_t n_nodes() const noexcept { return n_unknowns / n_fields(); }
  std::size_t index(std::size_t node, std::size_t field) const noexcept { return node * n_fields() + field; }
  std::size_t temperature_field() const noexcept { return n_species; }
  std::size_t velocity_field(std::size_t k) const noexcept { return n_species + 1 + k; }
  std::size_t pressure_field() const noexcept { return n_species + 4; }

  /// Throws std::invalid_argument unless the layout and reaction list agree.
  void validate() const;
};

template <class Scalar>
struct KernelScratch {
  std::vector<Scalar> density;
  std::vector<Scalar> speed;
  Scalar heat{};
};

/// Residual of species s at node q; an unevaluated expression for lazy
/// scalars. Every species uses the same form: the inflow term of species 0
/// and the outflow term of the last species carry a zero coefficient.
template <class Scalar>
auto species_residual(const KernelSpec& sp, std::span<const Scalar> x, const KernelScratch<Scalar>& w,
                      std::size_t q, std::size_t s) {
  using std::exp;
  const std::size_t nn = sp.n_nodes();
  const std::size_t prev = (q + nn - 1) % nn;
  const std::size_t next = (q + 1) % nn;
  const double h = sp.spacing;
  const Scalar& c = x[sp.index(q, s)];
  const Scalar& cp = x[sp.index(prev, s)];
  const Scalar& cn = x[sp.index(next, s)];
  const Scalar& temp = x[sp.index(q, sp.temperature_field())];

  const bool has_out = s + 1 < sp.n_species;
  const bool has_in = s > 0;
  const ArrheniusParams& out = sp.reactions[has_out ? s : s - 1];
  const ArrheniusParams& in = sp.reactions[has_in ? s - 1 : s];
  const Scalar& c_in = x[sp.index(q, has_in ? s - 1 : s)];
  const double a_out = has_out ? out.pre_exponential : 0.0;
  const double a_in = has_in ? in.pre_exponential : 0.0;

  return w.density[q] * w.speed[q] * (cn - cp) * (0.5 / h) +
         sp.diffusivity * (2.0 * c - cp - cn) * (1.0 / (h * h)) +
         a_out * exp(-out.activation_temperature / temp) * c -
         a_in * exp(-in.activation_temperature / temp) * c_in;
}

/// Element residual r(x). All Scalar temporaries live in `w`, so repeated
/// evaluations reuse their derivative storage.
template <class Scalar>
void kernel_residual(const KernelSpec& sp, std::span<const Scalar> x, KernelScratch<Scalar>& w,
                     std::span<Scalar> r) {
  using std::exp;
  using std::sqrt;
  const std::size_t nn = sp.n_nodes();
  const std::size_t ns = sp.n_species;
  const double h = sp.spacing;
  const double t0 = sp.reference_temperature;
  w.density.resize(nn);
  w.speed.resize(nn);

  for (std::size_t q = 0; q < nn; ++q) {
    const Scalar& temp = x[sp.index(q, sp.temperature_field())];
    const Scalar& p = x[sp.index(q, sp.pressure_field())];
    w.density[q] = p / (sp.gas_constant * temp) * t0;
    w.speed[q] = x[sp.index(q, sp.velocity_field(0))] + 0.5 * x[sp.index(q, sp.velocity_field(1))] +
                 0.25 * x[sp.index(q, sp.velocity_field(2))];
  }

  for (std::size_t q = 0; q < nn; ++q) {
    const std::size_t prev = (q + nn - 1) % nn;
    const std::size_t next = (q + 1) % nn;
    for (std::size_t s = 0; s < ns; ++s) r[sp.index(q, s)] = species_residual(sp, x, w, q, s);

    const std::size_t tf = sp.temperature_field();
    const Scalar& temp = x[sp.index(q, tf)];
    const Scalar& tp = x[sp.index(prev, tf)];
    const Scalar& tn = x[sp.index(next, tf)];
    const ArrheniusParams& r0 = sp.reactions[0];
    w.heat = r0.heat_release * r0.pre_exponential * exp(-r0.activation_temperature / temp) * x[sp.index(q, 0)];
    for (std::size_t s = 1; s + 1 < ns; ++s) {
      const ArrheniusParams& rs = sp.reactions[s];
      w.heat = w.heat + rs.heat_release * rs.pre_exponential * exp(-rs.activation_temperature / temp) *
                            x[sp.index(q, s)];
    }
    r[sp.index(q, tf)] = sp.heat_capacity * w.density[q] * w.speed[q] * (tn - tp) * (0.5 / h) +
                         sp.conductivity * (2.0 * temp - tp - tn) * (1.0 / (h * h)) - w.heat;

    const Scalar& pp = x[sp.index(prev, sp.pressure_field())];
    const Scalar& pn = x[sp.index(next, sp.pressure_field())];
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t vf = sp.velocity_field(k);
      const Scalar& v = x[sp.index(q, vf)];
      const Scalar& vp = x[sp.index(prev, vf)];
      const Scalar& vn = x[sp.index(next, vf)];
      const double pressure_weight = k == 0 ? 1.0 : 0.0;
      const double lift = k == 2 ? sp.buoyancy : 0.0;
      r[sp.index(q, vf)] = w.density[q] * w.speed[q] * (vn - vp) * (0.5 / h) +
                           pressure_weight * (pn - pp) * (0.5 / h) +
                           sp.viscosity * sqrt(temp * (1.0 / t0)) * (2.0 * v - vp - vn) * (1.0 / (h * h)) -
                           lift * w.density[q] * (temp - t0) * (1.0 / t0);
    }

    const Scalar& up = x[sp.index(prev, sp.velocity_field(0))];
    const Scalar& un = x[sp.index(next, sp.velocity_field(0))];
    const Scalar& vp = x[sp.index(prev, sp.velocity_field(1))];
    const Scalar& vn = x[sp.index(next, sp.velocity_field(1))];
    const Scalar& wp = x[sp.index(prev, sp.velocity_field(2))];
    const Scalar& wn = x[sp.index(next, sp.velocity_field(2))];
    r[sp.index(q, sp.pressure_field())] =
        (w.density[next] * un - w.density[prev] * up) * (0.5 / h) + 0.5 * (vn - vp) * (0.5 / h) +
        0.25 * (wn - wp) * (0.5 / h);
  }
}

/// Residual on plain doubles.
std::vector<double> kernel_residual(const KernelSpec& spec, std::span<const double> state);

struct KernelJacobian {
  std::vector<double> residual;
  std::vector<double> jacobian;  // row-major, n_unknowns x n_unknowns
  std::size_t n = 0;
  double operator()(std::size_t row, std::size_t col) const { return jacobian[row * n + col]; }
};

/// Residual and dr/dx with all n_unknowns state entries seeded as
/// independent variables.
KernelJacobian evaluate_kernel_jacobian(Strategy s, const KernelSpec& spec, std::span<const double> state);

/// Random state: temperatures in [900, 1100], species in [0.1, 1], velocities
/// in [-1, 1], pressures in [0.8, 1.2].
std::vector<double> sample_kernel_state(const KernelSpec& spec, std::uint64_t seed);

}  // namespace etfad
