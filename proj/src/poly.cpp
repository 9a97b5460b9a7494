#include "bctk/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace bctk {

int Poly::degree() const {
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
    if (c[k] != Complex(0.0, 0.0)) return k;
  return -1;
}

Complex Poly::operator()(Complex z) const {
  Complex acc(0.0, 0.0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

void Poly::eval2(Complex z, Complex& p, Complex& dp) const {
  p = Complex(0.0, 0.0);
  dp = Complex(0.0, 0.0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
  }
}

double Poly::magnitude(double r) const {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + std::abs(*it);
  return acc;
}

Poly Poly::derivative() const {
  if (c.size() <= 1) return Poly({Complex(0.0, 0.0)});
  std::vector<Complex> d(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
  return Poly(std::move(d));
}

Poly Poly::trimmed(double rel) const {
  double m = 0.0;
  for (auto& x : c) m = std::max(m, std::abs(x));
  std::vector<Complex> out = c;
  while (!out.empty() && std::abs(out.back()) <= rel * m) out.pop_back();
  if (out.empty()) out.push_back(Complex(0.0, 0.0));
  return Poly(std::move(out));
}

Poly Poly::reversed(int n) const {
  std::vector<Complex> out(n + 1, Complex(0.0, 0.0));
  for (int k = 0; k <= n && k < static_cast<int>(c.size()); ++k) out[n - k] = c[k];
  return Poly(std::move(out));
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<Complex> out(std::max(a.c.size(), b.c.size()), Complex(0.0, 0.0));
  for (std::size_t k = 0; k < a.c.size(); ++k) out[k] += a.c[k];
  for (std::size_t k = 0; k < b.c.size(); ++k) out[k] += b.c[k];
  return Poly(std::move(out));
}

Poly operator-(const Poly& a, const Poly& b) { return a + Complex(-1.0, 0.0) * b; }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.c.empty() || b.c.empty()) return Poly({Complex(0.0, 0.0)});
  std::vector<Complex> out(a.c.size() + b.c.size() - 1, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) out[i + j] += a.c[i] * b.c[j];
  return Poly(std::move(out));
}

Poly operator*(Complex s, const Poly& a) {
  std::vector<Complex> out = a.c;
  for (auto& x : out) x *= s;
  return Poly(std::move(out));
}

Poly compose(const Poly& p, const Poly& q) {
  Poly acc({Complex(0.0, 0.0)});
  for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) acc = acc * q + Poly({*it});
  return acc;
}

namespace {

double backward_residual(const Poly& p, Complex z) {
  const double scale = p.magnitude(std::abs(z));
  return scale > 0.0 ? std::abs(p(z)) / scale : 0.0;
}

std::vector<Complex> aberth_once(const Poly& p, int n, double phase, int max_iter) {
  // Initial circle radius from the Fujiwara bound.
  const Complex lead = p.c[n];
  double radius = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = std::abs(p.c[k] / lead);
    if (a > 0.0) radius = std::max(radius, std::pow(a, 1.0 / (n - k)));
  }
  radius = std::max(radius, 1e-3);
  std::vector<Complex> z(n);
  for (int k = 0; k < n; ++k)
    z[k] = std::polar(radius, phase + 2.0 * std::numbers::pi * k / n);

  double prev = std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int it = 0; it < max_iter; ++it) {
    double biggest = 0.0;
    for (int i = 0; i < n; ++i) {
      Complex v, dv;
      p.eval2(z[i], v, dv);
      if (v == Complex(0.0, 0.0)) continue;
      const Complex ratio = v / dv;
      Complex s(0.0, 0.0);
      for (int j = 0; j < n; ++j)
        if (j != i) s += 1.0 / (z[i] - z[j]);
      const Complex w = ratio / (1.0 - ratio * s);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
      z[i] -= w;
      biggest = std::max(biggest, std::abs(w) / (1.0 + std::abs(z[i])));
    }
    if (biggest < 1e-16) break;
    if (biggest >= 0.5 * prev) {
      if (++stall > 25) break;
    } else {
      stall = 0;
    }
    prev = std::min(prev, biggest);
  }
  return z;
}

}  // namespace

std::vector<Complex> aberth_roots(const Poly& input, const RootOptions& opt) {
  Poly p = input.trimmed();
  const int n = p.degree();
  if (n <= 0) return {};
  std::vector<Complex> zeros;
  int low = 0;
  while (p.c[low] == Complex(0.0, 0.0)) ++low;
  if (low > 0) {
    zeros.assign(low, Complex(0.0, 0.0));
    p = Poly(std::vector<Complex>(p.c.begin() + low, p.c.end()));
  }
  const int m = n - low;
  if (m == 0) return zeros;
  if (m == 1) {
    zeros.push_back(-p.c[0] / p.c[1]);
    return zeros;
  }
  double worst = 0.0;
  for (int attempt = 0; attempt <= opt.restarts; ++attempt) {
    const double phase = 0.4 + 0.7137 * attempt + 0.1 * static_cast<double>(opt.seed % 97);
    auto z = aberth_once(p, m, phase, opt.max_iterations);
    worst = 0.0;
    for (const auto& r : z) worst = std::max(worst, backward_residual(p, r));
    if (worst <= opt.residual_tol) {
      zeros.insert(zeros.end(), z.begin(), z.end());
      return zeros;
    }
  }
  std::ostringstream os;
  os << "Aberth iteration left backward residual " << worst << " above " << opt.residual_tol
     << " for a degree " << n << " polynomial";
  throw NumericError("root-certification", os.str());
}

namespace {

bool multiple_root_check(const Poly& p, Complex& zeta, int m) {
  std::vector<Poly> ders{p};
  for (int j = 1; j < m; ++j) ders.push_back(ders.back().derivative());
  // Newton on p^(m-1), whose root is simple.
  const Poly& q = ders.back();
  const Poly dq = q.derivative();
  for (int it = 0; it < 30; ++it) {
    const Complex d = dq(zeta);
    if (d == Complex(0.0, 0.0)) break;
    const Complex step = q(zeta) / d;
    zeta -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(zeta))) break;
  }
  const double r = std::abs(zeta);
  for (int j = 0; j < m; ++j) {
    const double scale = ders[j].magnitude(r);
    if (scale > 0.0 && std::abs(ders[j](zeta)) > 1e-9 * scale) return false;
  }
  return true;
}

}  // namespace

std::vector<Root> clustered_roots(const Poly& input, const RootOptions& opt) {
  const Poly p = input.trimmed();
  auto z = aberth_roots(p, opt);
  const int n = static_cast<int>(z.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(z[i] - z[j]) <= 1e-3 * std::max(1.0, std::abs(z[i]))) parent[find(i)] = find(j);

  std::vector<std::vector<int>> groups(n);
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);

  std::vector<Root> out;
  const Poly dp = p.derivative();
  for (auto& g : groups) {
    if (g.empty()) continue;
    const int m = static_cast<int>(g.size());
    if (m > 1) {
      Complex mean(0.0, 0.0);
      for (int i : g) mean += z[i];
      mean /= static_cast<double>(m);
      if (multiple_root_check(p, mean, m)) {
        out.push_back({mean, m});
        continue;
      }
    }
    for (int i : g) {
      Complex r = z[i];
      for (int it = 0; it < 3; ++it) {
        const Complex d = dp(r);
        if (d == Complex(0.0, 0.0)) break;
        const Complex step = p(r) / d;
        if (!std::isfinite(std::abs(step))) break;
        const Complex cand = r - step;
        if (backward_residual(p, cand) > backward_residual(p, r)) break;
        r = cand;
      }
      out.push_back({r, 1});
    }
  }
  std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });
  return out;
}

}  // namespace bctk
