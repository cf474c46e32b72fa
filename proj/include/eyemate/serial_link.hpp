#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eyemate/rng.hpp"

namespace eyemate {

/// Ordered byte stream between firmware and app. Lossless unless a fault
/// profile is attached.
struct LinkBuffer {
  std::string pending;
  std::size_t delivered_frames = 0;
};

struct LinkFaultProfile {
  double drop_prob = 0.0;
};

/// Appends a frame. Throws std::invalid_argument on an empty frame.
void send(LinkBuffer& link, std::string_view frame);

/// Extracts every complete newline-terminated token; a trailing partial
/// token stays in the buffer.
std::vector<std::string> deframe(LinkBuffer& link);

class SerialLink {
 public:
  SerialLink() = default;
  SerialLink(LinkFaultProfile faults, std::uint64_t seed) : faults_(faults), rng_(seed) {}

  /// Returns false when the fault profile dropped the frame.
  bool send(std::string_view frame);
  std::vector<std::string> receive() { return deframe(buffer_); }

  const LinkBuffer& buffer() const { return buffer_; }

 private:
  LinkFaultProfile faults_{};
  Rng rng_{0};
  LinkBuffer buffer_;
};

}  // namespace eyemate
