#include "calderon/gauge.hpp"

#include <memory>

#include "calderon/error.hpp"

namespace calderon {

CylinderDiffeo::CylinderDiffeo(int dim, double delta, Profile s, std::vector<Profile> shears,
                               std::string id)
    : dim_(dim), delta_(delta), s_(std::move(s)), shears_(std::move(shears)), id_(std::move(id)) {
  if (dim_ < 2) throw Error(ErrorCode::kDimensionTooSmall, "diffeo needs dim >= 2");
  if (!(delta_ > 0.0 && delta_ < 0.5)) throw Error(ErrorCode::kInvalidArgument, "collar delta must lie in (0, 1/2)");
  if (static_cast<int>(shears_.size()) != dim_ - 1) {
    throw Error(ErrorCode::kShapeMismatch, "one shear profile per angular direction");
  }
  constexpr int kSamples = 4097;
  for (int k = 0; k < kSamples; ++k) {
    const double t = static_cast<double>(k) / (kSamples - 1);
    if (!(s_.df(t) > 0.0)) {
      throw Error(ErrorCode::kNonOrientationPreserving, "s'(t) <= 0 at t = " + std::to_string(t));
    }
  }
}

CylinderDiffeo CylinderDiffeo::identity(int dim, double delta) {
  return CylinderDiffeo(dim, delta, identity_profile(),
                        std::vector<Profile>(dim - 1, zero_profile()), "identity");
}

CylinderDiffeo CylinderDiffeo::reparametrization(int dim, const std::string& family,
                                                 double amplitude, double delta) {
  Profile b;
  if (family == "bump") {
    b = bump_profile(delta, 1.0 - delta);
  } else if (family == "cubic") {
    b = cubic_bump_profile(delta, 1.0 - delta);
  } else if (family == "identity") {
    return identity(dim, delta);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown reparametrization family " + family);
  }
  Profile s{[b, amplitude](double t) { return t + amplitude * b.f(t); },
            [b, amplitude](double t) { return 1.0 + amplitude * b.df(t); },
            [b, amplitude](double t) { return amplitude * b.d2f(t); }};
  return CylinderDiffeo(dim, delta, std::move(s), std::vector<Profile>(dim - 1, zero_profile()),
                        family + "(" + std::to_string(amplitude) + ")");
}

CylinderDiffeo CylinderDiffeo::with_bump_shear(const std::vector<double>& amplitudes) const {
  if (static_cast<int>(amplitudes.size()) != dim_ - 1) {
    throw Error(ErrorCode::kShapeMismatch, "one shear amplitude per angular direction");
  }
  const Profile b = bump_profile(delta_, 1.0 - delta_);
  std::vector<Profile> shears = shears_;
  for (int k = 0; k < dim_ - 1; ++k) {
    const Profile old = shears_[k];
    const double a = amplitudes[k];
    shears[k] = {[old, b, a](double t) { return old.f(t) + a * b.f(t); },
                 [old, b, a](double t) { return old.df(t) + a * b.df(t); },
                 [old, b, a](double t) { return old.d2f(t) + a * b.d2f(t); }};
  }
  return CylinderDiffeo(dim_, delta_, s_, std::move(shears), id_ + "+shear");
}

Point CylinderDiffeo::apply(const Point& p) const {
  Point q = p;
  q[0] = s_.f(p[0]);
  for (int k = 1; k < dim_; ++k) q[k] = p[k] + shears_[k - 1].f(p[0]);
  return q;
}

SymMatrix CylinderDiffeo::jacobian(const Point& p) const {
  SymMatrix j = SymMatrix::Identity(dim_, dim_);
  j(0, 0) = s_.df(p[0]);
  for (int k = 1; k < dim_; ++k) j(k, 0) = shears_[k - 1].df(p[0]);
  return j;
}

SymMatrix CylinderDiffeo::jacobian_t_derivative(const Point& p) const {
  SymMatrix dj = SymMatrix::Zero(dim_, dim_);
  dj(0, 0) = s_.d2f(p[0]);
  for (int k = 1; k < dim_; ++k) dj(k, 0) = shears_[k - 1].d2f(p[0]);
  return dj;
}

CylinderDiffeo CylinderDiffeo::then(const CylinderDiffeo& psi) const {
  if (psi.dim_ != dim_) throw Error(ErrorCode::kShapeMismatch, "composed diffeos differ in dimension");
  const Profile si = s_;
  const Profile so = psi.s_;
  Profile s{[si, so](double t) { return so.f(si.f(t)); },
            [si, so](double t) { return so.df(si.f(t)) * si.df(t); },
            [si, so](double t) {
              const double d1 = si.df(t);
              return so.d2f(si.f(t)) * d1 * d1 + so.df(si.f(t)) * si.d2f(t);
            }};
  std::vector<Profile> shears;
  for (int k = 0; k < dim_ - 1; ++k) {
    const Profile ti = shears_[k];
    const Profile to = psi.shears_[k];
    shears.push_back({[si, ti, to](double t) { return ti.f(t) + to.f(si.f(t)); },
                      [si, ti, to](double t) { return ti.df(t) + to.df(si.f(t)) * si.df(t); },
                      [si, ti, to](double t) {
                        const double d1 = si.df(t);
                        return ti.d2f(t) + to.d2f(si.f(t)) * d1 * d1 + to.df(si.f(t)) * si.d2f(t);
                      }});
  }
  return CylinderDiffeo(dim_, std::min(delta_, psi.delta_), std::move(s), std::move(shears),
                        psi.id_ + "o" + id_);
}

MetricSource pullback_metric(const MetricSource& g, const CylinderDiffeo& phi) {
  if (g.dim != phi.dim()) throw Error(ErrorCode::kShapeMismatch, "diffeo and metric differ in dimension");
  const int n = g.dim;
  MetricSource out;
  out.dim = n;
  out.id = "pullback(" + g.id + "," + phi.id() + ")";
  out.value = [g, phi](const Point& p) {
    const SymMatrix j = phi.jacobian(p);
    return SymMatrix(j.transpose() * g.value(phi.apply(p)) * j);
  };
  if (g.has_derivative()) {
    out.derivative = [g, phi, n](const Point& p, int axis) {
      const SymMatrix j = phi.jacobian(p);
      const Point q = phi.apply(p);
      const SymMatrix gq = g.value(q);
      SymMatrix dg = SymMatrix::Zero(n, n);
      for (int b = 0; b < n; ++b) dg += g.derivative(q, b) * j(b, axis);
      SymMatrix result = j.transpose() * dg * j;
      if (axis == 0) {
        const SymMatrix dj = phi.jacobian_t_derivative(p);
        result += dj.transpose() * gq * j + j.transpose() * gq * dj;
      }
      return result;
    };
  }
  return out;
}

MetricSource pullback_metric(const MetricField& g, const CylinderDiffeo& phi) {
  auto field = std::make_shared<const MetricField>(g.without_source());
  MetricSource sampled;
  sampled.dim = g.dim();
  sampled.id = g.id() + "[interpolated]";
  sampled.value = [field](const Point& p) { return field->evaluate(p); };
  return pullback_metric(sampled, phi);
}

std::vector<GapRow> diffeo_invariance_gap(const MetricSource& g, const CylinderDiffeo& phi,
                                          Boundary gamma, const std::vector<CylinderGrid>& grids,
                                          int mode_cut) {
  const MetricSource pulled = pullback_metric(g, phi);
  std::vector<GapRow> rows;
  for (const auto& grid : grids) {
    const DNMatrix base = dn_map_partial(assemble_stiffness(sample_metric(g, grid)), gamma);
    const DNMatrix moved = dn_map_partial(assemble_stiffness(sample_metric(pulled, grid)), gamma);
    const OperatorGap gap = operator_gap(moved, base, mode_cut);
    rows.push_back({grid.id(), grid.spacing(0), gap.frobenius_rel, gap.lowmode_rel});
  }
  return rows;
}

}  // namespace calderon
