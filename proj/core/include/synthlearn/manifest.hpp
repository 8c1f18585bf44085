#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace synthlearn {

inline constexpr const char* kToolVersion = "synthlearn 0.1.0";

// Record of one tool invocation: the resolved configuration plus content
// hashes of every input file. Reissuing the recorded command against inputs
// with matching hashes reproduces the run's outputs byte for byte, so the
// manifest deliberately carries no timestamps or host details.
struct RunManifest {
  std::string command;     // subcommand name
  std::string profile;     // profile the config was derived from
  std::uint64_t seed = 0;  // global seed
  std::string config_text; // canonical resolved config (Config::render)
  std::vector<std::string> argv;  // invocation args after the binary name
  std::vector<std::pair<std::string, std::string>> inputs;   // path -> content hash
  std::vector<std::string> outputs;                          // paths written by the run
};

std::string file_hash_hex(const std::string& path);

void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

// Exclusive ownership of a run's output directory for the process lifetime,
// via a .lock file created with O_EXCL. A leftover lock from a crashed run
// must be removed by hand.
class RunLock {
public:
  explicit RunLock(const std::string& dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

private:
  std::string path_;
};

}  // namespace synthlearn
