#include "uccert/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "uccert/version.hpp"

namespace uccert {

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand;
  j["parameters"] = parameters;
  j["master_seed"] = master_seed;
  j["outputs"] = outputs;
  j["toolkit_version"] =
      toolkit_version.empty() ? std::string(version_string) : toolkit_version;
  j["wall_time_s"] = wall_time_s;
  return j;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace uccert
