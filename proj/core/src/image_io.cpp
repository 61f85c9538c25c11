#include "phaseprior/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace phaseprior {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// Reads the next whitespace-delimited PNM header token, skipping comments.
std::string next_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

RealPlane load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open image " + path.string());
  const std::string magic = next_token(in);
  if (magic != "P5" && magic != "P2") throw Error(path.string() + " is not a grayscale PGM");
  std::size_t width = 0;
  std::size_t height = 0;
  long maxval = 0;
  try {
    width = std::stoul(next_token(in));
    height = std::stoul(next_token(in));
    maxval = std::stol(next_token(in));
  } catch (const std::exception&) {
    throw Error("malformed PGM header in " + path.string());
  }
  if (width == 0 || height == 0 || maxval <= 0 || maxval > 65535) {
    throw Error("unsupported PGM header in " + path.string());
  }
  RealPlane p(height, width);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (magic == "P2") {
    for (auto& v : p) {
      const std::string tok = next_token(in);
      if (tok.empty()) throw Error("truncated PGM " + path.string());
      v = std::stod(tok) * scale;
    }
    return p;
  }
  const std::size_t bytes_per = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(height * width * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw Error("truncated PGM " + path.string());
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    const unsigned v = bytes_per == 1 ? raw[i] : (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
    p[i] = v * scale;
  }
  return p;
}

RealPlane load_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error("cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error("cannot decode PNG " + path.string() + ": " + msg);
  }
  RealPlane p(image.height, image.width);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = buffer[i] / 255.0;
  return p;
}

}  // namespace

RealPlane load_grayscale(const std::filesystem::path& path) {
  const auto ext = lower_extension(path);
  if (ext == ".png") return load_png(path);
  return load_pgm(path);
}

void save_pgm(const std::filesystem::path& path, const RealPlane& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << p.width() << ' ' << p.height() << "\n255\n";
  for (double v : p) {
    const double c = std::clamp(v, 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
  }
}

RealPlane center_crop(const RealPlane& p, std::size_t height, std::size_t width) {
  if (height == 0) height = p.height();
  if (width == 0) width = p.width();
  if (height > p.height() || width > p.width()) {
    throw InvalidDimension("crop window larger than the image");
  }
  const std::size_t r0 = (p.height() - height) / 2;
  const std::size_t c0 = (p.width() - width) / 2;
  RealPlane out(height, width);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) out(r, c) = p(r0 + r, c0 + c);
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t plane_hash(const RealPlane& p) {
  std::string bytes;
  bytes.reserve(16 + 8 * p.size());
  auto put = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<char>(v >> (8 * i)));
  };
  put(p.height());
  put(p.width());
  for (double v : p) put(std::bit_cast<std::uint64_t>(v));
  return fnv1a(bytes);
}

}  // namespace phaseprior
