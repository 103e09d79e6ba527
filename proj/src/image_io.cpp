// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>

#include "awarp/error.hpp"
#include "awarp/raster.hpp"

namespace awarp {
namespace {

// Keeps a single allocation below 2^31 samples.
constexpr std::uint64_t kMaxSamples = std::uint64_t{1} << 31;

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  // Next whitespace-delimited token; '#' starts a comment to end of line.
  std::string token() {
    skip_space_and_comments();
    std::string tok;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) {
      tok.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (tok.empty()) throw Error(ErrorKind::Format, "image header truncated");
    return tok;
  }

  std::uint64_t number(const char* what) {
    const std::string tok = token();
    if (tok.size() > 12 || !std::all_of(tok.begin(), tok.end(), [](char c) {
          return std::isdigit(static_cast<unsigned char>(c));
        })) {
      throw Error(ErrorKind::Format, std::string("bad header field: ") + what);
    }
    return std::stoull(tok);
  }

  // Exactly one whitespace byte separates the header from the payload.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorKind::Format, "image header not terminated");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

std::uint64_t checked_samples(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  if (a == 0 || b == 0 || c == 0) throw Error(ErrorKind::Format, "zero image dimension");
  if (a > kMaxSamples || b > kMaxSamples / a || c > kMaxSamples / (a * b)) {
    throw Error(ErrorKind::Format, "image dimensions overflow");
  }
  return a * b * c;
}

IntensityImage read_pgm(const std::vector<unsigned char>& bytes) {
  HeaderReader h(bytes);
  h.token();  // magic
  const std::uint64_t w = h.number("width");
  const std::uint64_t ht = h.number("height");
  const std::uint64_t maxval = h.number("maxval");
  if (maxval == 0 || maxval > 65535) throw Error(ErrorKind::Format, "PGM maxval out of range");
  const std::uint64_t n = checked_samples(w, ht, 1);
  const std::size_t bpp = maxval > 255 ? 2 : 1;
  const std::size_t off = h.payload_offset();
  if (bytes.size() - off < n * bpp) throw Error(ErrorKind::Format, "PGM payload truncated");

  std::vector<double> v(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    v[k] = bpp == 1 ? bytes[off + k]
                    : static_cast<double>((bytes[off + 2 * k] << 8) | bytes[off + 2 * k + 1]);
  }
  return IntensityImage(GridFrame::unit(static_cast<std::int64_t>(w), static_cast<std::int64_t>(ht)),
                        1, std::move(v));
}

IntensityImage read_awf1(const std::vector<unsigned char>& bytes) {
  HeaderReader h(bytes);
  h.token();
  const std::uint64_t ch = h.number("channels");
  const std::uint64_t nx = h.number("nx");
  const std::uint64_t ny = h.number("ny");
  const std::uint64_t n = checked_samples(ch, nx, ny);
  const std::size_t off = h.payload_offset();
  if (bytes[off - 1] != '\n') throw Error(ErrorKind::Format, "AWF1 header must end with newline");
  if (bytes.size() - off < n * 4) throw Error(ErrorKind::Format, "AWF1 payload truncated");

  std::vector<double> v(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    const unsigned char* p = bytes.data() + off + 4 * k;
    const std::uint32_t bits = std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
                               (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
    const float f = std::bit_cast<float>(bits);
    if (!std::isfinite(f)) throw Error(ErrorKind::Format, "AWF1 contains non-finite value");
    v[k] = f;
  }
  return IntensityImage(GridFrame::unit(static_cast<std::int64_t>(nx), static_cast<std::int64_t>(ny)),
                        static_cast<std::size_t>(ch), std::move(v));
}

void write_bytes(const std::filesystem::path& path, const std::string& header,
                 const std::vector<unsigned char>& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot create " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace

IntensityImage read_image(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = slurp(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return read_pgm(bytes);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), "AWF1", 4) == 0) return read_awf1(bytes);
  throw Error(ErrorKind::Format, "unrecognized image format: " + path.string());
}

void write_image(const IntensityImage& img, const std::filesystem::path& path,
                 ImageFormat format) {
  if (format == ImageFormat::Auto) {
    format = path.extension() == ".pgm" ? ImageFormat::Pgm8 : ImageFormat::Awf1;
  }
  const GridFrame& f = img.frame();
  const auto v = img.values();
  std::vector<unsigned char> payload;

  if (format == ImageFormat::Awf1) {
    payload.resize(v.size() * 4);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v[k]));
      for (int b = 0; b < 4; ++b) payload[4 * k + b] = static_cast<unsigned char>(bits >> (8 * b));
    }
    std::ostringstream hdr;
    hdr << "AWF1 " << img.channels() << ' ' << f.nx << ' ' << f.ny << '\n';
    write_bytes(path, hdr.str(), payload);
    return;
  }

  if (img.channels() != 1) {
    throw Error(ErrorKind::InvalidArgument, "PGM output needs a single-channel image");
  }
  const bool wide = format == ImageFormat::Pgm16;
  const double maxval = wide ? 65535.0 : 255.0;
  payload.reserve(v.size() * (wide ? 2 : 1));
  for (double x : v) {
    const auto q = static_cast<std::uint32_t>(std::clamp(std::round(x), 0.0, maxval));
    if (wide) payload.push_back(static_cast<unsigned char>(q >> 8));
    payload.push_back(static_cast<unsigned char>(q & 0xFF));
  }
  std::ostringstream hdr;
  hdr << "P5\n" << f.nx << ' ' << f.ny << '\n' << (wide ? 65535 : 255) << '\n';
  write_bytes(path, hdr.str(), payload);
}

}  // namespace awarp
