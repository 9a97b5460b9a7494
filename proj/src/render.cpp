#include "bctk/render.hpp"

#include <cmath>

#include "bctk/parallel.hpp"

namespace bctk {

namespace {

bool near_julia(const RationalMap& R, Complex z, double pixel, int iterations, double escape) {
  const double size = pixel * 2.0 / (1.0 + std::norm(z));
  double log_d = std::log(size);
  SpherePoint p = SpherePoint::from_complex(z);
  for (int k = 0; k < iterations; ++k) {
    const double s = R.spherical_derivative(p);
    if (s == 0.0) return false;
    log_d += std::log(s);
    if (log_d > 0.0) return true;
    p = R(p);
    if (escape > 0.0 && (p.is_infinity() || std::abs(p.finite()) > escape)) return false;
  }
  return false;
}

}  // namespace

std::vector<std::uint8_t> render_mask(const RationalMap& R, const RenderOptions& opt) {
  if (opt.width < 1 || opt.height < 1 || opt.width > 8192 || opt.height > 8192)
    throw PreconditionError("width and height must lie in [1, 8192]");
  if (!(opt.xmax > opt.xmin) || !(opt.ymax > opt.ymin) || !std::isfinite(opt.xmax - opt.xmin) ||
      !std::isfinite(opt.ymax - opt.ymin))
    throw PreconditionError("viewport must have positive finite size");
  if (opt.iterations < 1) throw PreconditionError("iterations must be >= 1");
  if (opt.kv_depth < 0) throw PreconditionError("kv depth must be >= 0");
  if (opt.kv_depth > 0 && !opt.nice) throw PreconditionError("K(V) overlay needs a nice set");

  const double hx = (opt.xmax - opt.xmin) / opt.width;
  const double hy = (opt.ymax - opt.ymin) / opt.height;
  const double pixel = std::max(hx, hy);
  const double escape = R.is_polynomial() ? escape_radius(R) : 0.0;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(opt.width) * opt.height, 0);
  parallel_for(static_cast<std::size_t>(opt.height), opt.workers, [&](std::size_t row) {
    const double y = opt.ymax - (static_cast<double>(row) + 0.5) * hy;
    for (int col = 0; col < opt.width; ++col) {
      const Complex z(opt.xmin + (col + 0.5) * hx, y);
      std::uint8_t v = 0;
      if (near_julia(R, z, pixel, opt.iterations, escape)) {
        v = kJuliaLevel;
      } else if (opt.nice) {
        const SpherePoint p = SpherePoint::from_complex(z);
        if (opt.nice->contains(p))
          v = kNiceLevel;
        else if (opt.kv_depth > 0 && in_KV(R, p, *opt.nice, opt.kv_depth))
          v = kKVLevel;
      }
      out[row * opt.width + col] = v;
    }
  });
  return out;
}

std::string to_pgm(const std::vector<std::uint8_t>& pixels, int width, int height) {
  if (pixels.size() != static_cast<std::size_t>(width) * height) throw PreconditionError("pixel count mismatch");
  std::string s = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  s.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
  return s;
}

}  // namespace bctk
