#include "jigsaw/jpeg.hpp"

// clang-format off
#include <cstdio>
#include <csetjmp>
#include <jpeglib.h>
// clang-format on

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numbers>

#include "jigsaw/error.hpp"

namespace jigsaw {
namespace {

struct ErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void on_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<ErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void on_message(j_common_ptr) {}

// No C++ objects with destructors live across setjmp in the two functions
// below; errors are reported through `message`.
bool encode_raw(const Image& img, const JpegParams& params, unsigned char** out,
                unsigned long* out_size, char* message) {
  jpeg_compress_struct cinfo;
  ErrorManager err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = on_error;
  err.pub.output_message = on_message;
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_compress(&cinfo);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, out, out_size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, params.quality, TRUE);
  cinfo.dct_method = JDCT_ISLOW;
  const int luma = params.subsampling == Subsampling::k420 ? 2 : 1;
  cinfo.comp_info[0].h_samp_factor = luma;
  cinfo.comp_info[0].v_samp_factor = luma;
  for (int c = 1; c < 3; ++c) {
    cinfo.comp_info[c].h_samp_factor = 1;
    cinfo.comp_info[c].v_samp_factor = 1;
  }
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(img.data().data() + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

bool decode_raw(const unsigned char* data, std::size_t size, std::uint8_t** pixels, int* width,
                int* height, char* message) {
  jpeg_decompress_struct cinfo;
  ErrorManager err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = on_error;
  err.pub.output_message = on_message;
  *pixels = nullptr;
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    std::free(*pixels);
    *pixels = nullptr;
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_start_decompress(&cinfo);
  *width = static_cast<int>(cinfo.output_width);
  *height = static_cast<int>(cinfo.output_height);
  const std::size_t stride = static_cast<std::size_t>(*width) * 3;
  *pixels = static_cast<std::uint8_t*>(std::malloc(stride * static_cast<std::size_t>(*height)));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = *pixels + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

// Dequantized DCT coefficients of a three-component YCbCr stream, in
// malloc'd storage so they can cross the setjmp boundary.
struct Coefficients {
  int width = 0;
  int height = 0;
  int max_h = 1;
  int max_v = 1;
  int h_samp[3] = {};
  int v_samp[3] = {};
  int blocks_w[3] = {};
  int blocks_h[3] = {};
  float* coef[3] = {};  // 64 per block, natural order, block rows top to bottom
};

void release(Coefficients& c) {
  for (float*& p : c.coef) {
    std::free(p);
    p = nullptr;
  }
}

// Returns 1 with `out` filled when the stream has subsampled chroma, 0 when
// the library decoder should be used as is, -1 on error.
int read_subsampled(const unsigned char* data, std::size_t size, Coefficients* out, char* message) {
  jpeg_decompress_struct cinfo;
  ErrorManager err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = on_error;
  err.pub.output_message = on_message;
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    release(*out);
    return -1;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  bool subsampled = false;
  if (cinfo.num_components == 3 && cinfo.jpeg_color_space == JCS_YCbCr) {
    for (int c = 0; c < 3; ++c) {
      subsampled |= cinfo.comp_info[c].h_samp_factor != cinfo.max_h_samp_factor ||
                    cinfo.comp_info[c].v_samp_factor != cinfo.max_v_samp_factor;
    }
  }
  if (!subsampled) {
    jpeg_destroy_decompress(&cinfo);
    return 0;
  }
  jvirt_barray_ptr* arrays = jpeg_read_coefficients(&cinfo);
  out->width = static_cast<int>(cinfo.image_width);
  out->height = static_cast<int>(cinfo.image_height);
  out->max_h = cinfo.max_h_samp_factor;
  out->max_v = cinfo.max_v_samp_factor;
  for (int c = 0; c < 3; ++c) {
    jpeg_component_info* comp = &cinfo.comp_info[c];
    if (comp->quant_table == nullptr) {
      std::strncpy(message, "missing quantization table", JMSG_LENGTH_MAX);
      jpeg_destroy_decompress(&cinfo);
      release(*out);
      return -1;
    }
    out->h_samp[c] = comp->h_samp_factor;
    out->v_samp[c] = comp->v_samp_factor;
    out->blocks_w[c] = static_cast<int>(comp->width_in_blocks);
    out->blocks_h[c] = static_cast<int>(comp->height_in_blocks);
    const std::size_t n = static_cast<std::size_t>(out->blocks_w[c]) * out->blocks_h[c] * DCTSIZE2;
    out->coef[c] = static_cast<float*>(std::malloc(n * sizeof(float)));
    for (JDIMENSION by = 0; by < comp->height_in_blocks; ++by) {
      JBLOCKARRAY row = (*cinfo.mem->access_virt_barray)(reinterpret_cast<j_common_ptr>(&cinfo), arrays[c], by,
                                                          1, FALSE);
      for (JDIMENSION bx = 0; bx < comp->width_in_blocks; ++bx) {
        float* dst = out->coef[c] + (static_cast<std::size_t>(by) * comp->width_in_blocks + bx) * DCTSIZE2;
        for (int k = 0; k < DCTSIZE2; ++k) {
          dst[k] = static_cast<float>(row[0][bx][k]) * static_cast<float>(comp->quant_table->quantval[k]);
        }
      }
    }
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return 1;
}

// One component plane at full resolution. A block of a component sampled
// s times below the maximum becomes an (8s)×(8s) tile through an 8s-point
// inverse DCT of its zero-extended coefficients, as the IJG decoder (v7 and
// later) does by default. Nothing leaks across block boundaries.
std::vector<std::uint8_t> reconstruct_plane(const Coefficients& c, int comp, int* plane_w) {
  const int sh = c.max_h / c.h_samp[comp];
  const int sv = c.max_v / c.v_samp[comp];
  const int nh = DCTSIZE * sh;
  const int nv = DCTSIZE * sv;
  auto basis = [](int n) {
    std::vector<float> t(static_cast<std::size_t>(n) * DCTSIZE);
    for (int x = 0; x < n; ++x) {
      for (int u = 0; u < DCTSIZE; ++u) {
        const double cu = u == 0 ? std::numbers::sqrt2 / 2 : 1.0;
        t[static_cast<std::size_t>(x) * DCTSIZE + u] =
            static_cast<float>(cu / 2 * std::cos((2 * x + 1) * u * std::numbers::pi / (2.0 * n)));
      }
    }
    return t;
  };
  const std::vector<float> th = basis(nh);
  const std::vector<float> tv = basis(nv);
  const int bw = c.blocks_w[comp];
  const int bh = c.blocks_h[comp];
  *plane_w = bw * nh;
  std::vector<std::uint8_t> plane(static_cast<std::size_t>(bw) * nh * bh * nv);
  std::vector<float> tmp(static_cast<std::size_t>(nv) * DCTSIZE);
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      const float* f = c.coef[comp] + (static_cast<std::size_t>(by) * bw + bx) * DCTSIZE2;
      // Columns first: tmp[y][u] = sum_v tv[y][v] F[v][u].
      for (int y = 0; y < nv; ++y) {
        for (int u = 0; u < DCTSIZE; ++u) {
          float acc = 0;
          for (int v = 0; v < DCTSIZE; ++v) {
            acc += tv[static_cast<std::size_t>(y) * DCTSIZE + v] * f[v * DCTSIZE + u];
          }
          tmp[static_cast<std::size_t>(y) * DCTSIZE + u] = acc;
        }
      }
      for (int y = 0; y < nv; ++y) {
        std::uint8_t* dst = plane.data() + (static_cast<std::size_t>(by) * nv + y) * *plane_w +
                            static_cast<std::size_t>(bx) * nh;
        for (int x = 0; x < nh; ++x) {
          float acc = 0;
          for (int u = 0; u < DCTSIZE; ++u) {
            acc += th[static_cast<std::size_t>(x) * DCTSIZE + u] * tmp[static_cast<std::size_t>(y) * DCTSIZE + u];
          }
          dst[x] = static_cast<std::uint8_t>(std::clamp(std::lround(acc + 128.0f), 0L, 255L));
        }
      }
    }
  }
  return plane;
}

Image decode_subsampled(const Coefficients& c) {
  std::vector<std::uint8_t> planes[3];
  int plane_w[3] = {};
  for (int comp = 0; comp < 3; ++comp) {
    planes[comp] = reconstruct_plane(c, comp, &plane_w[comp]);
  }
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(c.width) * c.height * 3);
  auto to_byte = [](double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); };
  for (int y = 0; y < c.height; ++y) {
    for (int x = 0; x < c.width; ++x) {
      const double luma = planes[0][static_cast<std::size_t>(y) * plane_w[0] + x];
      const double cb = planes[1][static_cast<std::size_t>(y) * plane_w[1] + x] - 128.0;
      const double cr = planes[2][static_cast<std::size_t>(y) * plane_w[2] + x] - 128.0;
      std::uint8_t* px = rgb.data() + (static_cast<std::size_t>(y) * c.width + x) * 3;
      px[0] = to_byte(luma + 1.402 * cr);
      px[1] = to_byte(luma - 0.344136286 * cb - 0.714136286 * cr);
      px[2] = to_byte(luma + 1.772 * cb);
    }
  }
  return Image(c.width, c.height, std::move(rgb));
}

}  // namespace

Subsampling parse_subsampling(const std::string& s) {
  if (s == "444" || s == "4:4:4") {
    return Subsampling::k444;
  }
  if (s == "420" || s == "4:2:0") {
    return Subsampling::k420;
  }
  throw ParameterError("unknown subsampling '" + s + "' (expected 444 or 420)");
}

std::string to_string(Subsampling s) { return s == Subsampling::k444 ? "444" : "420"; }

void validate(const JpegParams& params) {
  if (params.quality < 1 || params.quality > 100) {
    throw ParameterError("JPEG quality must be in [1, 100], got " + std::to_string(params.quality));
  }
}

std::vector<std::uint8_t> jpeg_bytes(const Image& img, const JpegParams& params) {
  validate(params);
  if (img.empty()) {
    throw DimensionError("cannot encode an empty image");
  }
  unsigned char* buf = nullptr;
  unsigned long size = 0;
  char message[JMSG_LENGTH_MAX] = {};
  const bool ok = encode_raw(img, params, &buf, &size, message);
  std::vector<std::uint8_t> out;
  if (ok) {
    out.assign(buf, buf + size);
  }
  std::free(buf);
  if (!ok) {
    throw CodecError(std::string("jpeg encode: ") + message);
  }
  return out;
}

Image decode_jpeg(std::span<const std::uint8_t> bytes) {
  char message[JMSG_LENGTH_MAX] = {};
  Coefficients coef;
  const int sub = read_subsampled(bytes.data(), bytes.size(), &coef, message);
  if (sub < 0) {
    throw CodecError(std::string("jpeg decode: ") + message);
  }
  if (sub > 0) {
    Image img = decode_subsampled(coef);
    release(coef);
    return img;
  }
  std::uint8_t* pixels = nullptr;
  int w = 0;
  int h = 0;
  if (!decode_raw(bytes.data(), bytes.size(), &pixels, &w, &h, message)) {
    throw CodecError(std::string("jpeg decode: ") + message);
  }
  std::vector<std::uint8_t> data(pixels, pixels + static_cast<std::size_t>(w) * h * 3);
  std::free(pixels);
  return Image(w, h, std::move(data));
}

Image jpeg_cycle(const Image& img, const JpegParams& params) {
  validate(params);
  if (img.width() < 16 || img.height() < 16) {
    throw DimensionError("jpeg_cycle needs at least 16x16 pixels");
  }
  return decode_jpeg(jpeg_bytes(img, params));
}

}  // namespace jigsaw
