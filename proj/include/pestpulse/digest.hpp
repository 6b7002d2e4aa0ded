#ifndef PESTPULSE_DIGEST_HPP
#define PESTPULSE_DIGEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace pestpulse {

// FNV-1a 64-bit. Used to fingerprint run inputs/outputs in manifests;
// not a cryptographic hash.
std::uint64_t fnv1a64(std::string_view bytes);

// "fnv64:<16 hex digits>" of the file contents.
std::string file_digest(const std::filesystem::path& path);

std::string digest_string(std::string_view bytes);

}  // namespace pestpulse

#endif  // PESTPULSE_DIGEST_HPP
