#include "vtpalm/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

namespace vtpalm {

namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors through longjmp; keep the message for the exception.
struct PngErrorState {
  std::string message;
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  if (state) state->message = msg ? msg : "libpng error";
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

RasterImage load_png(const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  require(file != nullptr, ErrorKind::IoFailure, "cannot open " + path.string());

  std::array<unsigned char, 8> signature{};
  if (std::fread(signature.data(), 1, signature.size(), file.get()) != signature.size() ||
      png_sig_cmp(signature.data(), 0, signature.size()) != 0) {
    fail(ErrorKind::CorruptData, "not a PNG stream: " + path.string());
  }

  PngErrorState err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
  require(png != nullptr, ErrorKind::IoFailure, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorKind::IoFailure, "png_create_info_struct failed");
  }

  std::vector<float> data;
  png_uint_32 width = 0, height = 0;
  std::size_t channels = 0;
  std::vector<png_bytep> rows;
  std::vector<unsigned char> buffer;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::CorruptData, path.string() + ": " + err.message);
  }

  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  if (bit_depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  channels = png_get_channels(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = buffer.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3) {
    fail(ErrorKind::UnsupportedFormat, path.string() + ": unsupported channel layout");
  }

  data.resize(static_cast<std::size_t>(width) * height * channels);
  if (out_depth == 16) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::uint16_t s;
      std::memcpy(&s, buffer.data() + 2 * i, 2);
      data[i] = static_cast<float>(s) / 65535.0f;
    }
  } else {
    for (png_uint_32 y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width * channels; ++x) {
        data[y * width * channels + x] = static_cast<float>(rows[y][x]) / 255.0f;
      }
    }
  }
  return RasterImage(width, height, channels, std::move(data));
}

void save_png(const RasterImage& img, const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  require(file != nullptr, ErrorKind::IoFailure, "cannot write " + path.string());

  PngErrorState err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
  require(png != nullptr, ErrorKind::IoFailure, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorKind::IoFailure, "png_create_info_struct failed");
  }

  std::vector<unsigned char> buffer(img.data().size());
  std::transform(img.data().begin(), img.data().end(), buffer.begin(), quantize_8bit);
  const std::size_t stride = img.width() * img.channels();
  std::vector<png_bytep> rows(img.height());
  for (std::size_t y = 0; y < img.height(); ++y) rows[y] = buffer.data() + y * stride;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::IoFailure, path.string() + ": " + err.message);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8,
               img.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Netpbm header tokens, skipping '#' comments.
bool read_pnm_token(std::istream& in, std::string& token) {
  token.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (!std::isspace(c)) {
      token.push_back(static_cast<char>(c));
      break;
    }
  }
  while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') token.push_back(static_cast<char>(in.get()));
  return !token.empty();
}

RasterImage load_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::IoFailure, "cannot open " + path.string());
  std::string magic, tw, th, tmax;
  if (!read_pnm_token(in, magic) || (magic != "P5" && magic != "P6")) {
    fail(magic.size() == 2 && magic[0] == 'P' ? ErrorKind::UnsupportedFormat : ErrorKind::CorruptData,
         path.string() + ": expected binary PGM (P5) or PPM (P6)");
  }
  if (!read_pnm_token(in, tw) || !read_pnm_token(in, th) || !read_pnm_token(in, tmax)) {
    fail(ErrorKind::CorruptData, path.string() + ": truncated header");
  }
  std::size_t width = 0, height = 0;
  int maxval = 0;
  try {
    width = std::stoul(tw);
    height = std::stoul(th);
    maxval = std::stoi(tmax);
  } catch (const std::exception&) {
    fail(ErrorKind::CorruptData, path.string() + ": malformed header");
  }
  if (maxval <= 0 || maxval > 65535) fail(ErrorKind::CorruptData, path.string() + ": bad maxval");
  if (maxval > 255) fail(ErrorKind::UnsupportedFormat, path.string() + ": 16-bit PNM not supported");
  in.get();  // single whitespace after maxval

  const std::size_t channels = magic == "P5" ? 1 : 3;
  std::vector<unsigned char> raw(width * height * channels);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    fail(ErrorKind::CorruptData, path.string() + ": truncated pixel data");
  }
  std::vector<float> data(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    data[i] = static_cast<float>(std::min<int>(raw[i], maxval)) / static_cast<float>(maxval);
  }
  return RasterImage(width, height, channels, std::move(data));
}

void save_pnm(const RasterImage& img, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::IoFailure, "cannot write " + path.string());
  out << (img.channels() == 1 ? "P5" : "P6") << "\n" << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> raw(img.data().size());
  std::transform(img.data().begin(), img.data().end(), raw.begin(), quantize_8bit);
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  require(out.good(), ErrorKind::IoFailure, "write failed: " + path.string());
}

}  // namespace

std::uint8_t quantize_8bit(float value) noexcept {
  const float clamped = std::clamp(value, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0f));
}

RasterImage load_image(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) fail(ErrorKind::MissingFile, path.string());
  const std::string ext = lower_extension(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return load_pnm(path);
  fail(ErrorKind::UnsupportedFormat, path.string() + ": unknown extension '" + ext + "'");
}

void save_image(const RasterImage& img, const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return save_png(img, path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
    require(ext != ".pgm" || img.channels() == 1, ErrorKind::UnsupportedFormat, "PGM requires one channel");
    require(ext != ".ppm" || img.channels() == 3, ErrorKind::UnsupportedFormat, "PPM requires three channels");
    return save_pnm(img, path);
  }
  fail(ErrorKind::UnsupportedFormat, path.string() + ": unknown extension '" + ext + "'");
}

}  // namespace vtpalm
