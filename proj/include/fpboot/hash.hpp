#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fpboot {

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint32_t fnv1a32(std::string_view bytes) noexcept {
  std::uint32_t h = 0x811c9dc5u;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x01000193u;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

}  // namespace fpboot
