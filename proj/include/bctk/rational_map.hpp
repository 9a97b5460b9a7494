/**
 * @file rational_map.hpp
 * @brief Rational maps of the sphere: evaluation in charts, spherical
 *        derivative, critical data, preimages and critical blocks.
 */
#pragma once

#include <map>
#include <string>
#include <vector>

#include "bctk/poly.hpp"
#include "bctk/sphere.hpp"

namespace bctk {

enum class JuliaStatus { Yes, No, Undetermined };
const char* to_string(JuliaStatus s);

struct CriticalDatum {
  SpherePoint point;
  int local_degree = 2;  ///< mu >= 2
  SpherePoint image;
  JuliaStatus in_julia = JuliaStatus::Undetermined;
  std::string evidence;
  int block_id = -1;
};

/// Critical points chained by their forward orbits, treated as one.
struct CriticalBlock {
  int id = 0;
  std::vector<int> members;  ///< indices into critical_points(), orbit order
  int tail = 0;              ///< member whose image is the block value
  int multiplicity = 1;      ///< product of local degrees
  SpherePoint value;
  bool in_julia = false;
};

struct PreimagePoint {
  SpherePoint point;
  int multiplicity = 1;
};

/// Image of a point and the derivative of R read in the canonical charts of
/// the point and of its image.
struct Jet {
  SpherePoint image;
  Complex derivative;
};

struct ClassifyOptions {
  int depth = 200;
  int max_period = 12;
  double cycle_tol = 1e-7;
  double neutral_tol = 1e-6;  ///< | |lambda| - 1 | below this is neutral
  std::map<int, JuliaStatus> overrides;
};

class RationalMap {
 public:
  /// Validates (degree >= 2, no common root) and normalises so that the
  /// polynomial of larger degree is monic.
  static RationalMap from_coefficients(std::vector<Complex> numerator,
                                       std::vector<Complex> denominator,
                                       const ClassifyOptions& opt = {});
  /// z^2 + c.
  static RationalMap quadratic(Complex c, const ClassifyOptions& opt = {});

  int degree() const { return degree_; }
  bool is_polynomial() const { return den_.degree() == 0; }
  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }
  /// Numerator and denominator read in the given source chart.
  const Poly& chart_numerator(Chart c) const { return c == Chart::Finite ? num_ : num_rev_; }
  const Poly& chart_denominator(Chart c) const { return c == Chart::Finite ? den_ : den_rev_; }

  SpherePoint operator()(const SpherePoint& z) const;
  /// Finite-plane evaluation; infinite components at poles.
  Complex operator()(Complex z) const;
  Jet jet(const SpherePoint& z) const;
  /// |R'(z)| (1 + |z|^2) / (1 + |R(z)|^2), valid at poles and infinity.
  double spherical_derivative(const SpherePoint& z) const;
  /// Planar R'(z); z must be finite and not a pole.
  Complex planar_derivative(Complex z) const;

  const std::vector<CriticalDatum>& critical_points() const { return crit_; }
  const std::vector<CriticalBlock>& critical_blocks() const { return blocks_; }
  std::vector<SpherePoint> critical_values() const;
  /// Indices of blocks whose members lie in the Julia set.
  std::vector<int> julia_blocks() const;
  /// Largest local degree among critical points in the Julia set (>= 2).
  int max_julia_local_degree() const;

  /// All solutions of R(z) = w with multiplicity; multiplicities sum to d.
  std::vector<PreimagePoint> preimages(const SpherePoint& w) const;

  /// Re-run classification with different options (e.g. overrides).
  RationalMap reclassified(const ClassifyOptions& opt) const;

 private:
  RationalMap() = default;
  void compute_critical_points();
  void classify(const ClassifyOptions& opt);
  void build_blocks(int depth, double tol);

  Poly num_, den_, num_rev_, den_rev_;
  int degree_ = 0;
  std::vector<CriticalDatum> crit_;
  std::vector<CriticalBlock> blocks_;
};

/// Julia-set membership of critical point @p index by orbit analysis.
JuliaStatus classify_in_julia(const RationalMap& R, int index, const ClassifyOptions& opt,
                              std::string* evidence = nullptr);

/// For polynomials: orbits leaving |z| <= this escape to infinity.
double escape_radius(const RationalMap& R);

/// Orbit z, R(z), ..., R^n(z).
std::vector<SpherePoint> orbit(const RationalMap& R, const SpherePoint& z, int n);

/// Newton solve of R^p(z) = z near @p start; returns the cycle point and the
/// multiplier (R^p)'(z). Fails with NumericError if Newton does not converge.
std::pair<SpherePoint, Complex> refine_periodic_point(const RationalMap& R,
                                                      const SpherePoint& start, int period);

}  // namespace bctk
