#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "calderon/metric.hpp"
#include "calderon/types.hpp"

namespace calderon {

/// Analytic scalar function with gradient and (optional) Hessian.
struct ScalarSource {
  int dim = 0;
  std::function<double(const Point&)> value;
  std::function<Covector(const Point&)> gradient;
  std::function<SymMatrix(const Point&)> hessian;
  std::string id = "scalar";

  bool has_gradient() const { return static_cast<bool>(gradient); }
  bool has_hessian() const { return static_cast<bool>(hessian); }
  double operator()(const Point& p) const { return value(p); }
};

/// A function of t alone with two derivatives.
struct Profile {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
};

Profile identity_profile();
Profile zero_profile();
/// C-infinity bump supported on (lo, hi), peak value 1 at the midpoint.
Profile bump_profile(double lo, double hi);
/// Polynomial bump 64 (tau (1 - tau))^3 on (lo, hi); C^2 at the ends.
Profile cubic_bump_profile(double lo, double hi);
/// C-infinity step: 0 for t <= lo, 1 for t >= hi.
Profile smooth_step_profile(double lo, double hi);

/// amplitude * sin(wavevector . p + phase)
struct TrigTerm {
  double amplitude;
  std::vector<double> wavevector;
  double phase;
};

ScalarSource constant_scalar(int dim, double value);
ScalarSource trig_series(int dim, double offset, std::vector<TrigTerm> terms,
                         std::string id = "trig");
/// Lifts a profile in t to a scalar on the cylinder.
ScalarSource t_profile(int dim, Profile profile, std::string id = "profile");

ScalarSource sum(const ScalarSource& a, const ScalarSource& b);
ScalarSource product(const ScalarSource& a, const ScalarSource& b);
ScalarSource affine(double offset, double scale, const ScalarSource& a);
/// a^exponent for a > 0.
ScalarSource power(const ScalarSource& a, double exponent);

/// offset + sum of `terms` random modes with angular wave numbers in {-1,0,1}
/// and t frequencies in [-pi, pi]; total amplitude bounded by `amplitude`.
ScalarSource random_trig_scalar(int dim, std::mt19937_64& rng, double offset,
                                double amplitude, int terms = 3);

MetricSource flat_metric(int dim);
MetricSource constant_metric(const SymMatrix& g, std::string id = "constant");
/// g = L L^T with L = I + sum C_m sin(k_m . p + phi_m) and ||L - I|| <= amplitude < 1,
/// so the eigenvalues lie in [(1-amplitude)^2, (1+amplitude)^2].
MetricSource random_smooth_metric(int dim, std::uint64_t seed, double amplitude, int terms = 3);

}  // namespace calderon
