#pragma once

#include <array>
#include <string>
#include <string_view>

namespace mappereeg {

/// Half-open frequency band [lo_hz, hi_hz).
struct Band {
  std::string name;
  double lo_hz = 0.0;
  double hi_hz = 0.0;

  double center_hz() const { return 0.5 * (lo_hz + hi_hz); }
  bool operator==(const Band&) const = default;
};

/// delta, theta, alpha, beta, gamma in ascending frequency.
const std::array<Band, 5>& canonical_bands();

/// Looks a canonical band up by name; throws Error for unknown names.
const Band& band_by_name(std::string_view name);

/// Position in canonical_bands(); higher means higher frequency.
std::size_t band_rank(std::string_view name);

}  // namespace mappereeg
