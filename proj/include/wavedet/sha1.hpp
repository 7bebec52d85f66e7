#ifndef WAVEDET_SHA1_HPP
#define WAVEDET_SHA1_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace wavedet {

/// SHA-1 digest as 40 lowercase hex characters.
std::string sha1_hex(std::string_view data);

/// Git-style blob hash: sha1("blob <size>\0" + content).
std::string git_blob_hash(std::string_view content);
std::string git_blob_hash_file(const std::filesystem::path& path);

} // namespace wavedet

#endif // WAVEDET_SHA1_HPP
