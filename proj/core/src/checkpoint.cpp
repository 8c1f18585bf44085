#include "synthlearn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace synthlearn {

namespace {

constexpr const char* kMagic = "SYNTHLEARN_CKPT v1";

void pack_le32(float v, unsigned char* out) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  out[0] = static_cast<unsigned char>(bits);
  out[1] = static_cast<unsigned char>(bits >> 8);
  out[2] = static_cast<unsigned char>(bits >> 16);
  out[3] = static_cast<unsigned char>(bits >> 24);
}

float unpack_le32(const unsigned char* in) {
  const std::uint32_t bits = static_cast<std::uint32_t>(in[0]) |
                             static_cast<std::uint32_t>(in[1]) << 8 |
                             static_cast<std::uint32_t>(in[2]) << 16 |
                             static_cast<std::uint32_t>(in[3]) << 24;
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

std::string widths_csv(const std::vector<std::size_t>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(w[i]);
  }
  return s;
}

std::vector<std::size_t> parse_widths_csv(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoull(tok));
  return out;
}

std::string expect_line(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("checkpoint: truncated header");
  if (line.rfind(key + " ", 0) != 0)
    throw ConfigError("checkpoint: expected '" + key + "' line, got '" + line + "'");
  return line.substr(key.size() + 1);
}

}  // namespace

void save_checkpoint(const std::string& path, const Model<float>& model,
                     const CheckpointMeta& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint: " + path);
  const ArchitectureSpec& s = model.spec;
  out << kMagic << "\n";
  out << "kind " << to_string(s.kind) << "\n";
  out << "resolution " << s.resolution << "\n";
  out << "latent_dim " << s.latent_dim << "\n";
  out << "class_count " << s.class_count << "\n";
  out << "embed_dim " << s.embed_dim << "\n";
  out << "widths " << widths_csv(s.widths) << "\n";
  out << "step " << meta.step << "\n";
  out << "images_shown " << meta.images_shown << "\n";
  out << "rng " << (meta.rng_state.empty() ? "none" : meta.rng_state) << "\n";
  const auto& index = model.net.param_index();
  out << "params " << index.size() << "\n";
  for (const auto& p : index) out << p.name << " " << p.offset << " " << p.size << "\n";

  const std::vector<float>& w = model.net.params();
  std::vector<unsigned char> bytes(w.size() * 4);
  for (std::size_t i = 0; i < w.size(); ++i) pack_le32(w[i], bytes.data() + 4 * i);
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
  out << "blob " << w.size() << " " << hex << "\n";
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("checkpoint write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read checkpoint: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw ConfigError("not a checkpoint file: " + path);

  ArchitectureSpec spec;
  spec.kind = model_kind_from_string(expect_line(in, "kind"));
  spec.resolution = std::stoull(expect_line(in, "resolution"));
  spec.latent_dim = std::stoull(expect_line(in, "latent_dim"));
  spec.class_count = std::stoull(expect_line(in, "class_count"));
  spec.embed_dim = std::stoull(expect_line(in, "embed_dim"));
  spec.widths = parse_widths_csv(expect_line(in, "widths"));

  CheckpointMeta meta;
  meta.step = std::stoll(expect_line(in, "step"));
  meta.images_shown = std::stoull(expect_line(in, "images_shown"));
  const std::string rng = expect_line(in, "rng");
  meta.rng_state = (rng == "none") ? std::string() : rng;

  const std::size_t nparams = std::stoull(expect_line(in, "params"));
  std::vector<NamedParam> index(nparams);
  for (auto& p : index) {
    if (!std::getline(in, line)) throw ConfigError("checkpoint: truncated param index");
    std::stringstream ss(line);
    if (!(ss >> p.name >> p.offset >> p.size))
      throw ConfigError("checkpoint: bad param index line: " + line);
  }

  std::stringstream blob_line(expect_line(in, "blob"));
  std::size_t count = 0;
  std::string want_hex;
  if (!(blob_line >> count >> want_hex)) throw ConfigError("checkpoint: bad blob line");

  LoadedCheckpoint r;
  r.model = build_model<float>(spec, 0);
  r.meta = meta;
  if (r.model.net.param_count() != count)
    throw ConfigError("checkpoint: parameter count does not match architecture");
  const auto& built = r.model.net.param_index();
  if (built.size() != index.size())
    throw ConfigError("checkpoint: parameter index does not match architecture");
  for (std::size_t i = 0; i < index.size(); ++i)
    if (built[i].name != index[i].name || built[i].offset != index[i].offset ||
        built[i].size != index[i].size)
      throw ConfigError("checkpoint: parameter '" + index[i].name +
                        "' does not match architecture");

  std::vector<unsigned char> bytes(count * 4);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
    throw ConfigError("checkpoint: truncated blob");
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
  if (want_hex != hex) throw ConfigError("checkpoint: blob checksum mismatch");
  std::vector<float>& w = r.model.net.params();
  for (std::size_t i = 0; i < count; ++i) w[i] = unpack_le32(bytes.data() + 4 * i);
  return r;
}

}  // namespace synthlearn
