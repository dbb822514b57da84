// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// Original/noised image pairs. Images are 8-bit binary PNM (P5 gray, P6 RGB);
// a saliency map in [0, 1] steers where perturbations land. Pixels with zero
// saliency are never modified.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "catts/parallel.hpp"

namespace catts {

struct RasterImage {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 (P5) or 3 (P6)
  std::vector<std::uint8_t> samples;  // row-major, interleaved channels

  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  bool operator==(const RasterImage&) const = default;
};

struct SaliencyMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major, [0, 1]
};

RasterImage read_pnm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_pnm(const RasterImage& image);

RasterImage read_pnm_file(const std::filesystem::path& path);
void write_pnm_file(const RasterImage& image, const std::filesystem::path& path);

/// Grayscale image scaled by 1/255.
SaliencyMap saliency_from_image(const RasterImage& gray);
SaliencyMap uniform_saliency(int width, int height, double value = 1.0);

/// Standard-normal draw for sample index `counter` under `seed`. Counter
/// based (SplitMix64 then inverse CDF), so every sample is independent of
/// evaluation order.
double noise_draw(std::uint64_t seed, std::uint64_t counter);

/// out[s] = clamp(in[s] + round(sigma · saliency[pixel(s)] · g_s), 0, 255),
/// with g_s = noise_draw(seed, s) over samples in raster order.
RasterImage apply_noise(const RasterImage& image, const SaliencyMap& saliency, double sigma,
                        std::uint64_t seed, Exec exec = Exec::Parallel);

/// Pixels with saliency ≥ threshold are filled with mid-gray.
RasterImage occlude(const RasterImage& image, const SaliencyMap& saliency, double threshold = 0.5,
                    std::uint8_t fill = 128);

/// Pixels with saliency ≥ threshold take the per-channel mean of their
/// block × block tile.
RasterImage mosaic(const RasterImage& image, const SaliencyMap& saliency, int block = 8,
                   double threshold = 0.5);

enum class Perturbation { Noise, Occlusion, Mosaic };
Perturbation parse_perturbation(std::string_view text);

}  // namespace catts
