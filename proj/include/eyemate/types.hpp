#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace eyemate {

/// Simulated time in integer milliseconds since scenario start.
using VirtualMs = std::int64_t;

/// Whole centimeters.
using Centimeters = int;

/// Seconds since the Unix epoch (UTC).
using UtcSeconds = std::int64_t;

enum class Channel { Ground, Left, Right };

inline constexpr Channel kServiceOrder[] = {Channel::Ground, Channel::Left, Channel::Right};

std::string_view to_string(Channel c);
Channel channel_from_string(std::string_view s);

enum class SurfaceKind { Concrete, Tiles };
enum class Weather { Dry, Wet };

std::string_view to_string(SurfaceKind s);
std::string_view to_string(Weather w);
SurfaceKind surface_from_string(std::string_view s);
Weather weather_from_string(std::string_view s);

/// Raised for out-of-domain arguments (bad time, wrong sample count, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a configuration table or file is incomplete or malformed.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eyemate
