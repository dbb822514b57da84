// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/noisegen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "catts/error.hpp"
#include "catts/rng.hpp"

namespace catts {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number(const char* what) {
    skip_space_and_comments();
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) throw Error(Errc::MalformedHeader, std::string(what) + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(Errc::MalformedHeader, std::string("missing ") + what);
    return value;
  }

  std::size_t& pos() { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void check_saliency(const RasterImage& image, const SaliencyMap& saliency) {
  if (saliency.width != image.width || saliency.height != image.height ||
      saliency.values.size() != image.pixel_count()) {
    throw Error(Errc::DimMismatch, "saliency map is " + std::to_string(saliency.width) + "x" +
                                       std::to_string(saliency.height) + ", image is " +
                                       std::to_string(image.width) + "x" +
                                       std::to_string(image.height));
  }
}

std::uint8_t clamp_byte(double v) { return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0)); }

}  // namespace

RasterImage read_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error(Errc::MalformedHeader, "expected P5 or P6 magic");
  }
  HeaderReader in(bytes);
  in.pos() = 2;
  RasterImage img;
  img.channels = bytes[1] == '6' ? 3 : 1;
  img.width = static_cast<int>(in.number("width"));
  img.height = static_cast<int>(in.number("height"));
  const long maxval = in.number("maxval");
  if (maxval != 255) {
    throw Error(Errc::MalformedHeader, "maxval " + std::to_string(maxval) + " unsupported (need 255)");
  }
  if (img.width <= 0 || img.height <= 0) throw Error(Errc::MalformedHeader, "empty image");
  if (in.pos() >= bytes.size() || !std::isspace(bytes[in.pos()])) {
    throw Error(Errc::MalformedHeader, "missing separator before pixel data");
  }
  ++in.pos();
  const std::size_t need = img.pixel_count() * static_cast<std::size_t>(img.channels);
  if (bytes.size() - in.pos() < need) {
    throw Error(Errc::TruncatedBody, "expected " + std::to_string(need) + " sample bytes, found " +
                                         std::to_string(bytes.size() - in.pos()));
  }
  const auto* body = bytes.data() + in.pos();
  img.samples.assign(body, body + need);
  return img;
}

std::vector<std::uint8_t> write_pnm(const RasterImage& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw Error(Errc::DimMismatch, "PNM supports 1 or 3 channels");
  }
  if (image.samples.size() != image.pixel_count() * static_cast<std::size_t>(image.channels)) {
    throw Error(Errc::DimMismatch, "sample count does not match dimensions");
  }
  const std::string header = std::string(image.channels == 3 ? "P6" : "P5") + "\n" +
                             std::to_string(image.width) + " " + std::to_string(image.height) +
                             "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.samples.begin(), image.samples.end());
  return out;
}

RasterImage read_pnm_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                        std::istreambuf_iterator<char>());
  return read_pnm(bytes);
}

void write_pnm_file(const RasterImage& image, const std::filesystem::path& path) {
  const auto bytes = write_pnm(image);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

SaliencyMap saliency_from_image(const RasterImage& gray) {
  if (gray.channels != 1) throw Error(Errc::DimMismatch, "saliency map must be grayscale (P5)");
  SaliencyMap map{gray.width, gray.height, std::vector<double>(gray.samples.size())};
  for (std::size_t i = 0; i < gray.samples.size(); ++i) map.values[i] = gray.samples[i] / 255.0;
  return map;
}

SaliencyMap uniform_saliency(int width, int height, double value) {
  return {width, height,
          std::vector<double>(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                              value)};
}

double noise_draw(std::uint64_t seed, std::uint64_t counter) {
  return inverse_normal_cdf(bits_to_open_unit(splitmix64(splitmix64(seed) + counter)));
}

RasterImage apply_noise(const RasterImage& image, const SaliencyMap& saliency, double sigma,
                        std::uint64_t seed, Exec exec) {
  check_saliency(image, saliency);
  if (!(sigma >= 0.0)) throw Error(Errc::OutOfRange, "sigma must be non-negative");
  RasterImage out = image;
  const std::size_t pixels = image.pixel_count();
  const auto ch = static_cast<std::size_t>(image.channels);
  auto row = [&](std::size_t y) {
    const std::size_t begin = y * static_cast<std::size_t>(image.width);
    for (std::size_t p = begin; p < begin + static_cast<std::size_t>(image.width) && p < pixels; ++p) {
      const double weight = sigma * saliency.values[p];
      if (weight == 0.0) continue;
      for (std::size_t c = 0; c < ch; ++c) {
        const std::size_t s = p * ch + c;
        out.samples[s] = clamp_byte(image.samples[s] + std::round(weight * noise_draw(seed, s)));
      }
    }
  };
  for_each_index(static_cast<std::size_t>(image.height), exec, row);
  return out;
}

RasterImage occlude(const RasterImage& image, const SaliencyMap& saliency, double threshold,
                    std::uint8_t fill) {
  check_saliency(image, saliency);
  RasterImage out = image;
  const auto ch = static_cast<std::size_t>(image.channels);
  for (std::size_t p = 0; p < image.pixel_count(); ++p) {
    if (saliency.values[p] < threshold) continue;
    std::fill_n(out.samples.begin() + static_cast<std::ptrdiff_t>(p * ch), ch, fill);
  }
  return out;
}

RasterImage mosaic(const RasterImage& image, const SaliencyMap& saliency, int block,
                   double threshold) {
  check_saliency(image, saliency);
  if (block < 1) throw Error(Errc::OutOfRange, "mosaic block size must be >= 1");
  RasterImage out = image;
  const auto ch = static_cast<std::size_t>(image.channels);
  const auto w = static_cast<std::size_t>(image.width);
  for (int by = 0; by < image.height; by += block) {
    for (int bx = 0; bx < image.width; bx += block) {
      const int ey = std::min(by + block, image.height), ex = std::min(bx + block, image.width);
      std::vector<double> mean(ch, 0.0);
      for (int y = by; y < ey; ++y)
        for (int x = bx; x < ex; ++x)
          for (std::size_t c = 0; c < ch; ++c) mean[c] += image.samples[(y * w + x) * ch + c];
      const double count = static_cast<double>((ey - by) * (ex - bx));
      for (int y = by; y < ey; ++y) {
        for (int x = bx; x < ex; ++x) {
          const std::size_t p = y * w + x;
          if (saliency.values[p] < threshold) continue;
          for (std::size_t c = 0; c < ch; ++c) out.samples[p * ch + c] = clamp_byte(std::round(mean[c] / count));
        }
      }
    }
  }
  return out;
}

Perturbation parse_perturbation(std::string_view text) {
  if (text == "noise" || text == "noised") return Perturbation::Noise;
  if (text == "occlusion") return Perturbation::Occlusion;
  if (text == "mosaic") return Perturbation::Mosaic;
  throw Error(Errc::Config, "unknown perturbation '" + std::string(text) + "'");
}

}  // namespace catts
