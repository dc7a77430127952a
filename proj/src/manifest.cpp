#include "reprrec/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "reprrec/error.hpp"
#include "reprrec/rng.hpp"

namespace reprrec {

std::string file_checksum_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "' for checksumming");
  std::ostringstream buf;
  buf << in.rdbuf();
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(buf.str())));
  return hex;
}

RunManifest::FileEntry RunManifest::checksum_entry(const std::string& path) {
  return {path, file_checksum_hex(path)};
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command_;
  j["seed"] = seed_;
  j["config"] = config_.is_null() ? nlohmann::ordered_json::object() : config_;
  auto files = [](const std::vector<FileEntry>& entries) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const FileEntry& e : entries) {
      arr.push_back({{"path", e.path}, {"fnv1a64", e.fnv1a64_hex}});
    }
    return arr;
  };
  j["inputs"] = files(inputs_);
  j["outputs"] = files(outputs_);
  nlohmann::ordered_json timings = nlohmann::ordered_json::array();
  for (const auto& [stage, seconds] : timings_) {
    timings.push_back({{"stage", stage}, {"seconds", seconds}});
  }
  j["timings"] = timings;
  return j;
}

void RunManifest::write_beside(const std::string& artifact_path) const {
  std::string path = artifact_path + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << to_json().dump(2) << '\n';
  if (!out.good()) throw Error("failed while writing '" + path + "'");
}

}  // namespace reprrec
