#include "synthlearn/image.hpp"

#include <cstdio>
#include <fstream>

namespace synthlearn {

GrayImage to_signed(const GrayImage& img) {
  if (img.range == ValueRange::Signed) return img;
  GrayImage out(img.height, img.width, ValueRange::Signed);
  for (std::size_t i = 0; i < img.values.size(); ++i)
    out.values[i] = img.values[i] * 2.0f - 1.0f;
  return out;
}

GrayImage to_unit(const GrayImage& img) {
  if (img.range == ValueRange::Unit) return img;
  GrayImage out(img.height, img.width, ValueRange::Unit);
  for (std::size_t i = 0; i < img.values.size(); ++i)
    out.values[i] = (img.values[i] + 1.0f) * 0.5f;
  return out;
}

void write_pgm(const GrayImage& img, const std::string& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16)
    throw ContractError("write_pgm: bit depth must be 8 or 16");
  const GrayImage unit = to_unit(img);
  const unsigned maxval = bit_depth == 8 ? 255u : 65535u;

  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("write_pgm: cannot open " + path);
  f << "P5\n" << unit.width << " " << unit.height << "\n" << maxval << "\n";

  std::vector<unsigned char> buf;
  buf.reserve(unit.values.size() * (bit_depth / 8));
  for (float v : unit.values) {
    float c = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
    unsigned q = static_cast<unsigned>(c * static_cast<float>(maxval) + 0.5f);
    if (q > maxval) q = maxval;
    if (bit_depth == 8) {
      buf.push_back(static_cast<unsigned char>(q));
    } else {
      buf.push_back(static_cast<unsigned char>(q >> 8));  // big-endian
      buf.push_back(static_cast<unsigned char>(q & 0xff));
    }
  }
  f.write(reinterpret_cast<const char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (!f) throw ConfigError("write_pgm: short write to " + path);
}

namespace {

int next_token(std::istream& f, std::string& tok) {
  tok.clear();
  int c = f.get();
  // skip whitespace and comments
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = f.get();
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      c = f.get();
    } else {
      break;
    }
  }
  while (c != EOF && c != ' ' && c != '\t' && c != '\r' && c != '\n' && c != '#') {
    tok.push_back(static_cast<char>(c));
    c = f.get();
  }
  return c;
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("read_pgm: cannot open " + path);

  std::string tok;
  next_token(f, tok);
  if (tok != "P5") throw ContractError("read_pgm: not a binary PGM (P5): " + path);
  next_token(f, tok);
  const long w = std::strtol(tok.c_str(), nullptr, 10);
  next_token(f, tok);
  const long h = std::strtol(tok.c_str(), nullptr, 10);
  int last = next_token(f, tok);
  const long maxval = std::strtol(tok.c_str(), nullptr, 10);
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
    throw ContractError("read_pgm: malformed header in " + path);
  // exactly one whitespace byte separates header and raster; next_token
  // already consumed it as the delimiter
  (void)last;

  const bool wide = maxval > 255;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<unsigned char> buf(n * (wide ? 2 : 1));
  f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(f.gcount()) != buf.size())
    throw ContractError("read_pgm: truncated raster in " + path);

  GrayImage img(static_cast<std::size_t>(h), static_cast<std::size_t>(w), ValueRange::Unit);
  const float scale = 1.0f / static_cast<float>(maxval);
  for (std::size_t i = 0; i < n; ++i) {
    unsigned q = wide ? (static_cast<unsigned>(buf[2 * i]) << 8) | buf[2 * i + 1]
                      : buf[i];
    img.values[i] = static_cast<float>(q) * scale;
  }
  return img;
}

}  // namespace synthlearn
