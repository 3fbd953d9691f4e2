#pragma once

#include <string>
#include <vector>

#include "calderon/analytic.hpp"
#include "calderon/dn_solver.hpp"
#include "calderon/metric.hpp"

namespace calderon {

/// (t, x) -> (s(t), x_k + theta_k(t)) with s = id and theta_k = 0 on the
/// collars [0, delta] and [1 - delta, 1].
class CylinderDiffeo {
 public:
  CylinderDiffeo(int dim, double delta, Profile s, std::vector<Profile> shears, std::string id);

  static CylinderDiffeo identity(int dim, double delta = 0.1);
  /// s(t) = t + amplitude * b((t - delta) / (1 - 2 delta)) with b a C-infinity
  /// bump ("bump") or 64 (tau (1 - tau))^3 ("cubic").
  static CylinderDiffeo reparametrization(int dim, const std::string& family, double amplitude,
                                          double delta = 0.1);
  /// Adds theta_k(t) = amplitudes[k-1] * bump(t) on the interior of the collars.
  CylinderDiffeo with_bump_shear(const std::vector<double>& amplitudes) const;

  int dim() const { return dim_; }
  double delta() const { return delta_; }
  const std::string& id() const { return id_; }

  Point apply(const Point& p) const;
  SymMatrix jacobian(const Point& p) const;
  /// d J / d t (J depends on t only).
  SymMatrix jacobian_t_derivative(const Point& p) const;

  /// Returns psi o phi where phi = *this.
  CylinderDiffeo then(const CylinderDiffeo& psi) const;

 private:
  int dim_;
  double delta_;
  Profile s_;
  std::vector<Profile> shears_;
  std::string id_;
};

/// J^T g(phi) J with analytic derivative when g has one. Throws
/// NonOrientationPreserving if s' <= 0 at any of 4097 samples in t.
MetricSource pullback_metric(const MetricSource& g, const CylinderDiffeo& phi);

/// Pullback of a sampled metric through multilinear interpolation; the
/// result has no derivative and an id tagged "interpolated".
MetricSource pullback_metric(const MetricField& g, const CylinderDiffeo& phi);

struct GapRow {
  std::string grid;
  double h;
  double frobenius_rel;
  double lowmode_rel;
};

/// operator_gap(Lambda_{phi^* g}, Lambda_g) on each grid.
std::vector<GapRow> diffeo_invariance_gap(const MetricSource& g, const CylinderDiffeo& phi,
                                          Boundary gamma, const std::vector<CylinderGrid>& grids,
                                          int mode_cut = 2);

}  // namespace calderon
