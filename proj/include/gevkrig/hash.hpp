#ifndef GEVKRIG_HASH_HPP
#define GEVKRIG_HASH_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>

#include "gevkrig/common.hpp"

namespace gevkrig {

// FNV-1a 64. Content fingerprints for manifests, not a security boundary.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string hash_bytes(std::string_view bytes) { return hash_hex(fnv1a(bytes)); }

inline std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open for hashing: " + path);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a(std::string_view(buf, static_cast<size_t>(in.gcount())), h);
  }
  return hash_hex(h);
}

}  // namespace gevkrig

#endif
