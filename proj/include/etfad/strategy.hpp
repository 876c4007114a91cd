#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace etfad {

/// Evaluation strategy used when an expression is assigned to a leaf.
///
/// `eager` applies each operator immediately (the non-expression-template
/// baseline). The remaining four build lazy expression trees and differ only
/// in the assignment-time algorithm.
enum class Strategy : std::uint8_t {
  eager,       ///< dual numbers, one derivative loop per operator
  standard,    ///< expression templates, recursive dx(i) per component
  cached,      ///< expression templates with a deferred cache pass
  elr,         ///< expression-level reverse mode
  cached_elr,  ///< cache pass followed by expression-level reverse mode
};

inline constexpr std::array<Strategy, 5> kAllStrategies{
    Strategy::eager, Strategy::standard, Strategy::cached, Strategy::elr,
    Strategy::cached_elr};

constexpr bool is_lazy(Strategy s) noexcept { return s != Strategy::eager; }

constexpr bool is_caching(Strategy s) noexcept {
  return s == Strategy::cached || s == Strategy::cached_elr;
}

constexpr bool uses_reverse_sweep(Strategy s) noexcept {
  return s == Strategy::elr || s == Strategy::cached_elr;
}

/// Short token used on the command line and in CSV output.
constexpr std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::eager: return "eager";
    case Strategy::standard: return "et";
    case Strategy::cached: return "cet";
    case Strategy::elr: return "elr";
    case Strategy::cached_elr: return "celr";
  }
  return "?";
}

constexpr std::optional<Strategy> parse_strategy(std::string_view token) noexcept {
  for (Strategy s : kAllStrategies) {
    if (to_string(s) == token) return s;
  }
  return std::nullopt;
}

}  // namespace etfad
