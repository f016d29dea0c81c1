#include "paramsens/cache.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "paramsens/digest.hpp"
#include "paramsens/log.hpp"

namespace paramsens {

namespace {

constexpr std::string_view kMagic = "paramsens-cache v1";

}  // namespace

ArtifactCache::ArtifactCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ArtifactCache::entry_path(std::string_view kind) const {
  return dir_ / (std::string(kind) + ".cache");
}

std::optional<std::string> ArtifactCache::load(std::string_view kind, std::string_view key) const {
  const auto path = entry_path(kind);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;

  std::string magic, key_line, sum_line, created_line, blank;
  if (!std::getline(in, magic) || magic != kMagic || !std::getline(in, key_line) || !std::getline(in, sum_line) ||
      !std::getline(in, created_line) || !std::getline(in, blank) || !blank.empty() ||
      !key_line.starts_with("key=") || !sum_line.starts_with("sha256=")) {
    log_warning("cache entry " + path.string() + " is corrupt; recomputing");
    in.close();
    std::filesystem::remove(path);
    return std::nullopt;
  }
  if (key_line.substr(4) != key) return std::nullopt;

  std::ostringstream payload;
  payload << in.rdbuf();
  std::string bytes = payload.str();
  if (sha256_hex(bytes) != sum_line.substr(7)) {
    log_warning("cache entry " + path.string() + " failed its checksum; recomputing");
    in.close();
    std::filesystem::remove(path);
    return std::nullopt;
  }
  return bytes;
}

void ArtifactCache::store(std::string_view kind, std::string_view key, std::string_view payload) const {
  const auto path = entry_path(kind);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
    const auto created = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
    out << kMagic << '\n'
        << "key=" << key << '\n'
        << "sha256=" << sha256_hex(payload) << '\n'
        << "created=" << created << '\n'
        << '\n';
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace paramsens
