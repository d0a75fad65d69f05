#include "fbve/reports.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fbve/errors.hpp"
#include "fbve/initial_data.hpp"

namespace fbve::io {

using nlohmann::json;

const char* version_string() { return FBVE_VERSION_STRING; }

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(tmp + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(tmp + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(path + ": rename failed: " + ec.message());
}

std::string manifest_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["code_version"] = version_string();
  j["config"] = m.config_json.empty() ? json() : json::parse(m.config_json);
  j["config_hash"] = m.config_hash;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["diagnostics_csv"] = m.diagnostics_csv;
  j["csv_schema_version"] = kCsvSchemaVersion;
  j["rng_algorithm"] = kRngAlgorithm;
  j["exit_status"] = m.exit_status;
  j["violation"] =
      m.violation ? json{{"reason", m.violation->reason}, {"t", m.violation->t}} : json();
  j["results"] = json::parse(m.results_json);
  j["warnings"] = m.warnings;
  return j.dump(2) + "\n";
}

std::string manifest_config(const std::string& manifest_text) {
  try {
    const json j = json::parse(manifest_text);
    return j.at("config").dump();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

}  // namespace fbve::io
