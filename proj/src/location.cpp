#include "eyemate/location.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace eyemate {

std::string_view to_string(Provider p) { return p == Provider::Gps ? "gps" : "network"; }

Provider provider_from_string(std::string_view s) {
  if (s == "gps") return Provider::Gps;
  if (s == "network") return Provider::Network;
  throw DomainError("unknown provider '" + std::string(s) + "'");
}

double round_coordinate(double degrees) {
  const double r = std::round(degrees * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;  // no "-0"
}

std::string format_coordinate(double degrees) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", round_coordinate(degrees));
  return buf;
}

std::string format_coordinate_short(double degrees) {
  std::string s = format_coordinate(degrees);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace eyemate
