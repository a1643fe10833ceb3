#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nehari/cli.hpp"

namespace nehari::cli {

/// Shortest of %.15g, %.16g, %.17g that reads back to the same double.
std::string fmt(double x);
/// Current UTC time as 2026-01-31T12:00:00Z.
std::string utc_now();

/// Writes files into one output directory and records them for the manifest.
class OutputDir {
 public:
  OutputDir(const RunConfig& config, std::string command);

  const std::filesystem::path& path() const { return dir_; }
  /// Writes `content` to `name`, replacing any previous file.
  void write(const std::string& name, const std::string& content);
  /// Writes manifest.json listing every file written so far.
  void finish();

 private:
  struct Entry {
    std::string name;
    std::uintmax_t bytes;
    std::string sha256;
  };
  std::filesystem::path dir_;
  std::string command_;
  std::string config_text_;
  std::string started_;
  std::vector<Entry> files_;
};

/// Digest of the configuration with the output directory blanked, so that
/// identical runs into different directories produce identical files.
std::string config_digest(const RunConfig& config);

/// '#'-prefixed metadata lines shared by every CSV file.
std::string csv_preamble(const RunConfig& config, const std::string& title);

}  // namespace nehari::cli
