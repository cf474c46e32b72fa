#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "eyemate/types.hpp"

namespace eyemate {

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_utc(UtcSeconds t);

/// Strict parse of "YYYY-MM-DDTHH:MM:SSZ"; nullopt on any deviation.
std::optional<UtcSeconds> parse_utc(std::string_view text);

}  // namespace eyemate
