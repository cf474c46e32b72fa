#include "eyemate/serial_link.hpp"

#include <stdexcept>

namespace eyemate {

void send(LinkBuffer& link, std::string_view frame) {
  if (frame.empty()) throw std::invalid_argument("serial link: empty frame");
  link.pending.append(frame);
}

std::vector<std::string> deframe(LinkBuffer& link) {
  std::vector<std::string> tokens;
  std::size_t begin = 0;
  for (std::size_t nl; (nl = link.pending.find('\n', begin)) != std::string::npos; begin = nl + 1)
    tokens.emplace_back(link.pending, begin, nl - begin);
  link.pending.erase(0, begin);
  link.delivered_frames += tokens.size();
  return tokens;
}

bool SerialLink::send(std::string_view frame) {
  if (frame.empty()) throw std::invalid_argument("serial link: empty frame");
  if (faults_.drop_prob > 0.0 && rng_.bernoulli(faults_.drop_prob)) return false;
  eyemate::send(buffer_, frame);
  return true;
}

}  // namespace eyemate
