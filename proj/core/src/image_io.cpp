#include "jigsaw/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "jigsaw/error.hpp"
#include "jigsaw/jpeg.hpp"

namespace jigsaw {

std::vector<std::uint8_t> encode_png(const Image& img) {
  png_image info;
  std::memset(&info, 0, sizeof(info));
  info.version = PNG_IMAGE_VERSION;
  info.width = static_cast<png_uint_32>(img.width());
  info.height = static_cast<png_uint_32>(img.height());
  info.format = PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&info, nullptr, &size, 0, img.data().data(), 0, nullptr)) {
    throw CodecError(std::string("png encode: ") + info.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&info, out.data(), &size, 0, img.data().data(), 0, nullptr)) {
    throw CodecError(std::string("png encode: ") + info.message);
  }
  out.resize(size);
  return out;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image info;
  std::memset(&info, 0, sizeof(info));
  info.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&info, bytes.data(), bytes.size())) {
    throw CodecError(std::string("png decode: ") + info.message);
  }
  // Alpha, if any, is composited onto black by the simplified API.
  info.format = PNG_FORMAT_RGB;
  Image img(static_cast<int>(info.width), static_cast<int>(info.height));
  if (!png_image_finish_read(&info, nullptr, img.data().data(), 0, nullptr)) {
    png_image_free(&info);
    throw CodecError(std::string("png decode: ") + info.message);
  }
  return img;
}

std::vector<std::uint8_t> encode_ppm(const Image& img) {
  const std::string header =
      "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data().begin(), img.data().end());
  return out;
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string ppm_token(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  for (;;) {
    while (pos < bytes.size() && std::isspace(bytes[pos])) {
      ++pos;
    }
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') {
        ++pos;
      }
      continue;
    }
    break;
  }
  std::string tok;
  while (pos < bytes.size() && !std::isspace(bytes[pos])) {
    tok.push_back(static_cast<char>(bytes[pos++]));
  }
  if (tok.empty()) {
    throw FormatError("ppm: truncated header");
  }
  return tok;
}

int parse_dim(const std::string& tok) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v < 0) {
      throw FormatError("ppm: bad header field '" + tok + "'");
    }
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("ppm: bad header field '" + tok + "'");
  }
}

}  // namespace

Image decode_ppm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  if (ppm_token(bytes, pos) != "P6") {
    throw FormatError("ppm: only binary P6 is supported");
  }
  const int w = parse_dim(ppm_token(bytes, pos));
  const int h = parse_dim(ppm_token(bytes, pos));
  const int maxval = parse_dim(ppm_token(bytes, pos));
  if (maxval != 255) {
    throw FormatError("ppm: maxval must be 255");
  }
  ++pos;  // single whitespace byte before the raster
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (bytes.size() < pos || bytes.size() - pos < need) {
    throw FormatError("ppm: raster truncated at byte " + std::to_string(bytes.size()));
  }
  return Image(w, h, std::vector<std::uint8_t>(bytes.begin() + pos, bytes.begin() + pos + need));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw FormatError("cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw FormatError("short write to " + path.string());
  }
}

Image read_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' && bytes[3] == 'G') {
    return decode_png(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8) {
    return decode_jpeg(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
    return decode_ppm(bytes);
  }
  throw FormatError("unrecognized image format: " + path.string());
}

void write_image(const std::filesystem::path& path, const Image& img) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (ext == ".png") {
    write_file(path, encode_png(img));
  } else if (ext == ".ppm" || ext == ".pnm") {
    write_file(path, encode_ppm(img));
  } else if (ext == ".jpg" || ext == ".jpeg") {
    write_file(path, jpeg_bytes(img, JpegParams{95, Subsampling::k444}));
  } else {
    throw ParameterError("unsupported output extension '" + ext + "'");
  }
}

}  // namespace jigsaw
