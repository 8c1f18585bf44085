#include "synthlearn/manifest.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "synthlearn/common.hpp"

namespace synthlearn {

std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for hashing: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string bytes = buf.str();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
  return hex;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  std::ostringstream out;
  out << "SYNTHLEARN_MANIFEST v1\n";
  out << "version " << kToolVersion << "\n";
  out << "command " << manifest.command << "\n";
  out << "profile " << manifest.profile << "\n";
  out << "seed " << manifest.seed << "\n";
  out << "argv " << manifest.argv.size() << "\n";
  for (const auto& a : manifest.argv) out << a << "\n";
  out << "inputs " << manifest.inputs.size() << "\n";
  for (const auto& [p, h] : manifest.inputs) out << h << " " << p << "\n";
  out << "outputs " << manifest.outputs.size() << "\n";
  for (const auto& p : manifest.outputs) out << p << "\n";
  out << "config " << manifest.config_text.size() << "\n";
  out << manifest.config_text;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write manifest: " + path);
  std::string s = out.str();
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!f) throw IoError("manifest write failed: " + path);
}

namespace {

std::string expect_prefix(std::istream& in, const std::string& key, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": truncated manifest, expected " + key);
  if (line.rfind(key + " ", 0) != 0 && line != key)
    throw IoError(path + ": expected '" + key + "', got '" + line + "'");
  return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
}

}  // namespace

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "SYNTHLEARN_MANIFEST v1")
    throw IoError(path + ": not a manifest file");
  RunManifest m;
  expect_prefix(in, "version", path);
  m.command = expect_prefix(in, "command", path);
  m.profile = expect_prefix(in, "profile", path);
  m.seed = static_cast<std::uint64_t>(std::stoull(expect_prefix(in, "seed", path)));
  std::size_t n_argv = std::stoull(expect_prefix(in, "argv", path));
  for (std::size_t i = 0; i < n_argv; ++i) {
    if (!std::getline(in, line)) throw IoError(path + ": truncated argv list");
    m.argv.push_back(line);
  }
  std::size_t n_inputs = std::stoull(expect_prefix(in, "inputs", path));
  for (std::size_t i = 0; i < n_inputs; ++i) {
    if (!std::getline(in, line)) throw IoError(path + ": truncated input list");
    std::size_t sp = line.find(' ');
    if (sp == std::string::npos) throw IoError(path + ": malformed input line '" + line + "'");
    m.inputs.emplace_back(line.substr(sp + 1), line.substr(0, sp));
  }
  std::size_t n_outputs = std::stoull(expect_prefix(in, "outputs", path));
  for (std::size_t i = 0; i < n_outputs; ++i) {
    if (!std::getline(in, line)) throw IoError(path + ": truncated output list");
    m.outputs.push_back(line);
  }
  std::size_t cfg_len = std::stoull(expect_prefix(in, "config", path));
  m.config_text.resize(cfg_len);
  in.read(m.config_text.data(), static_cast<std::streamsize>(cfg_len));
  if (in.gcount() != static_cast<std::streamsize>(cfg_len))
    throw IoError(path + ": truncated config block");
  return m;
}

RunLock::RunLock(const std::string& dir) {
  std::filesystem::create_directories(dir);
  path_ = (std::filesystem::path(dir) / ".lock").string();
  int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    path_.clear();
    throw ConfigError("output directory is locked by another run (or holds a stale .lock): " +
                      dir);
  }
  ::close(fd);
}

RunLock::~RunLock() {
  if (!path_.empty()) std::filesystem::remove(path_);
}

}  // namespace synthlearn
