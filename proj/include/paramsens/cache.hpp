#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace paramsens {

/// On-disk artifact store: one file per artifact kind, holding the content
/// digest key it was computed for, a checksum of the payload and the payload.
/// A lookup hits only when the key matches and the checksum verifies; corrupt
/// entries are removed with a warning.
class ArtifactCache {
 public:
  explicit ArtifactCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path entry_path(std::string_view kind) const;

  std::optional<std::string> load(std::string_view kind, std::string_view key) const;
  /// Atomic replace (temporary file + rename).
  void store(std::string_view kind, std::string_view key, std::string_view payload) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace paramsens
