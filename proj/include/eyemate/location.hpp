#pragma once

#include <string>
#include <string_view>

#include "eyemate/types.hpp"

namespace eyemate {

enum class Provider { Gps, Network };

std::string_view to_string(Provider p);  // "gps" | "network"
Provider provider_from_string(std::string_view s);

struct LocationFix {
  std::string device_id;
  double latitude = 0.0;
  double longitude = 0.0;
  UtcSeconds timestamp = 0;
  Provider provider = Provider::Gps;

  bool operator==(const LocationFix&) const = default;
};

/// Rounds to the 6-decimal grid used on the wire and in storage.
double round_coordinate(double degrees);

/// Fixed 6-decimal rendering, e.g. "22.900000".
std::string format_coordinate(double degrees);

/// Shortest rendering of a 6-decimal coordinate, e.g. "22.9".
std::string format_coordinate_short(double degrees);

}  // namespace eyemate
