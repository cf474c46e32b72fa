#include "eyemate/types.hpp"

#include <string>

namespace eyemate {

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::Ground: return "ground";
    case Channel::Left: return "left";
    case Channel::Right: return "right";
  }
  return "?";
}

Channel channel_from_string(std::string_view s) {
  if (s == "ground") return Channel::Ground;
  if (s == "left") return Channel::Left;
  if (s == "right") return Channel::Right;
  throw DomainError("unknown channel '" + std::string(s) + "'");
}

std::string_view to_string(SurfaceKind s) { return s == SurfaceKind::Concrete ? "concrete" : "tiles"; }
std::string_view to_string(Weather w) { return w == Weather::Dry ? "dry" : "wet"; }

SurfaceKind surface_from_string(std::string_view s) {
  if (s == "concrete") return SurfaceKind::Concrete;
  if (s == "tiles") return SurfaceKind::Tiles;
  throw DomainError("unknown surface '" + std::string(s) + "'");
}

Weather weather_from_string(std::string_view s) {
  if (s == "dry") return Weather::Dry;
  if (s == "wet") return Weather::Wet;
  throw DomainError("unknown weather '" + std::string(s) + "'");
}

}  // namespace eyemate
