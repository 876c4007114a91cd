#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>

namespace etfad::testing {

/// |a - b| <= tol * max(|a|, |b|, floor); equal values (including both zero)
/// pass. With floor = 0 this is purely relative.
inline bool rel_close(double a, double b, double tol, double floor = 0.0) {
  if (a == b) return true;
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) <= tol * scale;
}

/// Empty string when every component is rel_close, else a description of
/// the first offending component.
inline std::string compare_vectors(std::span<const double> a, std::span<const double> b, double tol,
                                   double floor = 0.0) {
  if (a.size() != b.size()) {
    return "length " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!rel_close(a[i], b[i], tol, floor)) {
      std::ostringstream os;
      os.precision(17);
      os << "component " << i << ": " << a[i] << " vs " << b[i];
      return os.str();
    }
  }
  return {};
}

}  // namespace etfad::testing
