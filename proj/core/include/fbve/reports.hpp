/// @file reports.hpp
/// @brief Run manifests and other run-end artifacts.
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fbve::io {

/// Version of the diagnostics CSV column layout.
inline constexpr int kCsvSchemaVersion = 1;

const char* version_string();

/// Current UTC time as ISO-8601 with second resolution.
std::string utc_now();

/// Writes to `path` through a temporary sibling and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

struct Violation {
  std::string reason;
  double t = 0.0;
};

struct RunManifest {
  std::string command;
  std::string config_json;  // resolved config
  std::string config_hash;
  std::string started;
  std::string finished;
  std::string diagnostics_csv;
  int exit_status = 0;
  std::optional<Violation> violation;
  /// Extra JSON object text merged under "results".
  std::string results_json = "{}";
  std::vector<std::string> warnings;
};

std::string manifest_json(const RunManifest& m);

/// Returns the resolved config JSON embedded in a manifest.
std::string manifest_config(const std::string& manifest_text);

}  // namespace fbve::io
