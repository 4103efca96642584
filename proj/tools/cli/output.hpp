#pragma once

#include <filesystem>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geophase::cli {

/// Bad flags, unknown presets, empty grids: anything that maps to exit code 2.
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// CSV cell for a number: shortest round-trip decimal text.
std::string cell(double value);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);
  void add_row(std::vector<std::string> row);
  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string sha256_hex(std::string_view bytes);
std::string base64(std::string_view bytes);

/// UTC timestamp; honours SOURCE_DATE_EPOCH for reproducible manifests.
std::string utc_timestamp();

/// Output files staged in memory and written together by commit(), so a
/// failing command leaves nothing behind. The manifest is written last.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);

  void add(std::string name, std::string bytes);
  const std::filesystem::path& dir() const noexcept { return dir_; }
  const std::vector<std::pair<std::string, std::string>>& files() const noexcept { return files_; }

  /// Writes every staged file, then manifest.json built from `manifest` plus
  /// the output list with sizes and SHA-256 digests.
  void commit(nlohmann::ordered_json manifest) const;

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace geophase::cli
