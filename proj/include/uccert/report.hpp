#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace uccert {

/// Provenance block embedded in every report the CLI emits.
struct RunManifest {
  std::string subcommand;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::uint64_t master_seed = 0;
  std::vector<std::string> outputs;  // files written by the run
  std::string toolkit_version;
  double wall_time_s = 0.0;

  nlohmann::ordered_json to_json() const;
};

/// Shortest text that round-trips the double (printf %.17g).
std::string fmt17(double x);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace uccert
