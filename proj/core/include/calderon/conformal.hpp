#pragma once

#include <vector>

#include "calderon/analytic.hpp"
#include "calderon/calculus.hpp"
#include "calderon/dn_solver.hpp"
#include "calderon/metric.hpp"

namespace calderon {

/// Positive conformal factor c on a grid.
class ConformalFactor {
 public:
  /// Throws NonPositiveFactor unless c > 0 at every node.
  ConformalFactor(ScalarField c, int dim);

  const ScalarField& field() const { return c_; }
  int dim() const { return dim_; }
  /// c^{n-2}, analytic when c carries a source.
  ScalarField power_field() const;
  ScalarSource power_source() const;

 private:
  ScalarField c_;
  int dim_;
};

/// c^4 g for n >= 3 (UnsupportedDimension for n = 2). When both g and c
/// carry analytic sources the result carries the product source.
MetricField scale_metric(const MetricField& g, const ConformalFactor& c);

/// First-power rescaling c g used for the two-dimensional invariance.
MetricField scale_metric_2d(const MetricField& g, const ConformalFactor& c);

struct PotentialOptions {
  /// Evaluate Delta_g c^{n-2} from analytic derivatives of g and c.
  bool analytic = false;
  /// Fill the t = 0, 1 layers by linear extrapolation of the stencil values.
  bool extend_boundary = true;
};

struct ConformalPotential {
  ScalarField q;
  bool boundary_extrapolated;
};

/// q = c^{2-n} Delta_g c^{n-2}. In analytic mode the field carries a
/// value-only source so quadrature can evaluate q off the nodes.
ConformalPotential conformal_potential(const MetricField& g, const ConformalFactor& c,
                                       const PotentialOptions& options = {});

/// Max over interior nodes of |-Delta_{c^4 g} f - c^{-(n+2)}(-Delta_g + q)(c^{n-2} f)|
/// with both Laplacians taken by the flux stencil.
double scaling_law_residual(const MetricField& g, const ConformalFactor& c, const ScalarField& f,
                            const PotentialOptions& options = {});

/// Max node-wise |<du,dw>_{c^4 g} dVol_{c^4 g} - (<d(c^{n-2}u), d(c^{n-2}w)>_g
/// - <d c^{n-2}, d(c^{n-2} u w)>_g) dVol_g| using analytic gradients.
double algebraic_identity_check(const MetricSource& g, const ScalarSource& c,
                                const ScalarSource& u, const ScalarSource& w,
                                const CylinderGrid& grid);

struct WeakConditionResidual {
  /// max over interior and Gamma rows of |K c^{n-2}| / (||K||_F ||c^{n-2}||_2).
  double residual;
  double interior_max;
  double gamma_max;
  /// max over Gamma rows of |K c^{n-2}| per boundary quadrature weight.
  double neumann_defect;
  /// max over Gamma of |c - 1|.
  double boundary_defect;
};

WeakConditionResidual weak_condition_residual(const MetricField& g, const ConformalFactor& c,
                                              Boundary gamma);

/// c = 1 + eps u (n = 3, needs min c >= 1/2) or (1 + eps u)^{1/(n-2)} (n > 3,
/// needs 1 + eps u > 0).
ConformalFactor conformal_family(const ScalarField& u, double eps, int n);

struct VolumeExpansion {
  /// p_0 .. p_6 of V(eps) = Vol_{c_eps^4 g} - Vol_g with c_eps = 1 + eps u.
  std::vector<double> coefficients;
  /// int u^2 dVol_g by the same quadrature.
  double u2_integral;
  std::vector<double> eps;
  std::vector<double> volumes;
};

/// n = 3 only; interpolates the exact degree-6 polynomial through >= 7
/// distinct samples (the first seven distinct values are used).
VolumeExpansion volume_expansion(const MetricField& g, const ScalarField& u,
                                 const std::vector<double>& eps_list);

/// Max |v - 1| for the discrete harmonic extension of v = 1 on the whole boundary.
double global_rigidity_check(const MetricField& g);

}  // namespace calderon
