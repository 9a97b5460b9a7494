/**
 * @file render.hpp
 * @brief Raster masks of Julia sets with optional nice-set and K(V)
 *        overlays, written as binary PGM.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bctk/nice.hpp"

namespace bctk {

struct RenderOptions {
  int width = 512;
  int height = 512;
  double xmin = -2.0, xmax = 2.0, ymin = -2.0, ymax = 2.0;
  int iterations = 100;
  const NiceSet* nice = nullptr;  ///< overlay, drawn at kNiceLevel
  int kv_depth = 0;               ///< > 0 with a nice set: K(V) overlay at kKVLevel
  int workers = 1;
};

inline constexpr std::uint8_t kJuliaLevel = 255;
inline constexpr std::uint8_t kNiceLevel = 170;
inline constexpr std::uint8_t kKVLevel = 85;

/// Row-major, row 0 at ymax. A pixel is in the Julia mask when the spherical
/// derivative of some iterate at its centre exceeds the reciprocal of the
/// pixel's chordal size, i.e. the pixel is within about one pixel of J.
std::vector<std::uint8_t> render_mask(const RationalMap& R, const RenderOptions& opt);

std::string to_pgm(const std::vector<std::uint8_t>& pixels, int width, int height);

}  // namespace bctk
