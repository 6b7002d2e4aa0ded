#include "pestpulse/digest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pestpulse/errors.hpp"

namespace pestpulse {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string digest_string(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for digest: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return digest_string(buffer.str());
}

}  // namespace pestpulse
