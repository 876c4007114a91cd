#pragma once

#include <cmath>
#include <cstdint>

#include "etfad/errors.hpp"

namespace etfad {

/// Per-thread tally of transcendental function evaluations.
///
/// Every catalog rule that calls sin/cos/tan/exp/log/sqrt/pow goes through
/// the wrappers in `etfad::counted`, so all five strategies are measured by
/// the same counter. Counts are kept per thread; a single-threaded run is
/// therefore exact.
struct MathCounter {
  bool enabled = false;
  std::uint64_t transcendental_calls = 0;
};

namespace detail {
inline thread_local MathCounter tls_counter{};
inline thread_local bool tls_strict_domain = false;
}  // namespace detail

inline void enable_counting(bool on = true) noexcept { detail::tls_counter.enabled = on; }
inline bool counting_enabled() noexcept { return detail::tls_counter.enabled; }
inline void reset_count() noexcept { detail::tls_counter.transcendental_calls = 0; }

/// Calls since the last reset on this thread; 0 while counting is disabled.
inline std::uint64_t count_transcendental() noexcept {
  return detail::tls_counter.enabled ? detail::tls_counter.transcendental_calls : 0;
}

/// Enables and resets the counter for its lifetime, restoring the previous
/// enabled state on exit.
class CountingScope {
 public:
  CountingScope() noexcept : was_enabled_(counting_enabled()) {
    enable_counting(true);
    reset_count();
  }
  ~CountingScope() { enable_counting(was_enabled_); }
  CountingScope(const CountingScope&) = delete;
  CountingScope& operator=(const CountingScope&) = delete;

  std::uint64_t count() const noexcept { return count_transcendental(); }

 private:
  bool was_enabled_;
};

/// When strict, domain violations (log of a non-positive value, division by
/// zero, sqrt of a negative value, pow outside its real domain) throw
/// DomainError instead of propagating inf/NaN.
inline void set_strict_domain(bool strict) noexcept { detail::tls_strict_domain = strict; }
inline bool strict_domain() noexcept { return detail::tls_strict_domain; }

class StrictDomainScope {
 public:
  StrictDomainScope() noexcept : previous_(strict_domain()) { set_strict_domain(true); }
  ~StrictDomainScope() { set_strict_domain(previous_); }
  StrictDomainScope(const StrictDomainScope&) = delete;
  StrictDomainScope& operator=(const StrictDomainScope&) = delete;

 private:
  bool previous_;
};

namespace detail {
inline void note_transcendental() noexcept {
  auto& c = tls_counter;
  if (c.enabled) ++c.transcendental_calls;
}

inline void require_domain(bool ok, const char* what) {
  if (!ok && tls_strict_domain) throw DomainError(what);
}
}  // namespace detail

namespace counted {
inline double sin(double a) noexcept { detail::note_transcendental(); return std::sin(a); }
inline double cos(double a) noexcept { detail::note_transcendental(); return std::cos(a); }
inline double tan(double a) noexcept { detail::note_transcendental(); return std::tan(a); }
inline double exp(double a) noexcept { detail::note_transcendental(); return std::exp(a); }
inline double log(double a) noexcept { detail::note_transcendental(); return std::log(a); }
inline double sqrt(double a) noexcept { detail::note_transcendental(); return std::sqrt(a); }
inline double pow(double a, double b) noexcept { detail::note_transcendental(); return std::pow(a, b); }
}  // namespace counted

}  // namespace etfad
