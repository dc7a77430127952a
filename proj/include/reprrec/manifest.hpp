#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace reprrec {

inline constexpr const char* kToolName = "reprrec";
inline constexpr const char* kToolVersion = "0.1.0";

// Reproducibility record written next to each CLI artifact: inputs and
// outputs with content checksums, the flag snapshot, seed, and stage timings.
class RunManifest {
 public:
  RunManifest(std::string command, std::uint64_t seed)
      : command_(std::move(command)), seed_(seed) {}

  void set_config(nlohmann::ordered_json config) { config_ = std::move(config); }
  void add_input(const std::string& path) { inputs_.push_back(checksum_entry(path)); }
  void add_output(const std::string& path) { outputs_.push_back(checksum_entry(path)); }
  void add_timing(const std::string& stage, double seconds) {
    timings_.emplace_back(stage, seconds);
  }

  nlohmann::ordered_json to_json() const;

  // writes "<artifact_path>.manifest.json"
  void write_beside(const std::string& artifact_path) const;

 private:
  struct FileEntry {
    std::string path;
    std::string fnv1a64_hex;
  };
  static FileEntry checksum_entry(const std::string& path);

  std::string command_;
  std::uint64_t seed_;
  nlohmann::ordered_json config_;
  std::vector<FileEntry> inputs_, outputs_;
  std::vector<std::pair<std::string, double>> timings_;
};

// fnv1a64 over the file's bytes, as 16 hex digits; throws on unreadable files
std::string file_checksum_hex(const std::string& path);

}  // namespace reprrec
