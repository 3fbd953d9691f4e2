#include "calderon/analytic.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "calderon/error.hpp"

namespace calderon {

Profile identity_profile() {
  return {[](double t) { return t; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}

Profile zero_profile() {
  auto zero = [](double) { return 0.0; };
  return {zero, zero, zero};
}

Profile bump_profile(double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorCode::kInvalidArgument, "bump needs lo < hi");
  const double width = hi - lo;
  // B(tau) = exp(4 - 1/tau - 1/(1-tau)); derivatives via phi = -1/tau - 1/(1-tau).
  auto eval = [=](double t, int order) {
    const double tau = (t - lo) / width;
    if (tau <= 0.0 || tau >= 1.0) return 0.0;
    const double a = tau;
    const double b = 1.0 - tau;
    const double phi = -1.0 / a - 1.0 / b;
    const double b0 = std::exp(4.0 + phi);
    if (order == 0) return b0;
    const double d1 = 1.0 / (a * a) - 1.0 / (b * b);
    if (order == 1) return b0 * d1 / width;
    const double d2 = -2.0 / (a * a * a) - 2.0 / (b * b * b);
    return b0 * (d2 + d1 * d1) / (width * width);
  };
  return {[=](double t) { return eval(t, 0); }, [=](double t) { return eval(t, 1); },
          [=](double t) { return eval(t, 2); }};
}

Profile cubic_bump_profile(double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorCode::kInvalidArgument, "bump needs lo < hi");
  const double width = hi - lo;
  // 64 q^3 with q = tau (1 - tau).
  auto eval = [=](double t, int order) {
    const double tau = (t - lo) / width;
    if (tau <= 0.0 || tau >= 1.0) return 0.0;
    const double q = tau * (1.0 - tau);
    const double dq = 1.0 - 2.0 * tau;
    if (order == 0) return 64.0 * q * q * q;
    if (order == 1) return 64.0 * 3.0 * q * q * dq / width;
    return 64.0 * (6.0 * q * dq * dq - 6.0 * q * q) / (width * width);
  };
  return {[=](double t) { return eval(t, 0); }, [=](double t) { return eval(t, 1); },
          [=](double t) { return eval(t, 2); }};
}

Profile smooth_step_profile(double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorCode::kInvalidArgument, "step needs lo < hi");
  const double width = hi - lo;
  // psi(x) = exp(-1/x); step = psi(x) / (psi(x) + psi(1 - x)).
  auto psi = [](double x, double out[3]) {
    if (x <= 0.0) {
      out[0] = out[1] = out[2] = 0.0;
      return;
    }
    const double e = std::exp(-1.0 / x);
    out[0] = e;
    out[1] = e / (x * x);
    out[2] = e * (1.0 - 2.0 * x) / (x * x * x * x);
  };
  auto eval = [=](double t, int order) {
    const double x = (t - lo) / width;
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return order == 0 ? 1.0 : 0.0;
    double p[3];
    double q[3];
    psi(x, p);
    psi(1.0 - x, q);
    // q' with respect to x carries a minus sign; q'' does not.
    const double s0 = p[0] + q[0];
    const double s1 = p[1] - q[1];
    const double s2 = p[2] + q[2];
    const double f = p[0] / s0;
    if (order == 0) return f;
    const double f1 = (p[1] - f * s1) / s0;
    if (order == 1) return f1 / width;
    const double f2 = (p[2] - 2.0 * f1 * s1 - f * s2) / s0;
    return f2 / (width * width);
  };
  return {[=](double t) { return eval(t, 0); }, [=](double t) { return eval(t, 1); },
          [=](double t) { return eval(t, 2); }};
}

ScalarSource constant_scalar(int dim, double value) {
  ScalarSource s;
  s.dim = dim;
  s.value = [value](const Point&) { return value; };
  s.gradient = [dim](const Point&) { return Covector(Covector::Zero(dim)); };
  s.hessian = [dim](const Point&) { return SymMatrix(SymMatrix::Zero(dim, dim)); };
  s.id = "const(" + std::to_string(value) + ")";
  return s;
}

ScalarSource trig_series(int dim, double offset, std::vector<TrigTerm> terms, std::string id) {
  for (const auto& term : terms) {
    if (static_cast<int>(term.wavevector.size()) != dim) {
      throw Error(ErrorCode::kShapeMismatch, "trig term wavevector has wrong dimension");
    }
  }
  auto shared = std::make_shared<const std::vector<TrigTerm>>(std::move(terms));
  auto phase_of = [dim](const TrigTerm& term, const Point& p) {
    double arg = term.phase;
    for (int a = 0; a < dim; ++a) arg += term.wavevector[a] * p[a];
    return arg;
  };
  ScalarSource s;
  s.dim = dim;
  s.id = std::move(id);
  s.value = [=](const Point& p) {
    double v = offset;
    for (const auto& term : *shared) v += term.amplitude * std::sin(phase_of(term, p));
    return v;
  };
  s.gradient = [=](const Point& p) {
    Covector g = Covector::Zero(dim);
    for (const auto& term : *shared) {
      const double c = term.amplitude * std::cos(phase_of(term, p));
      for (int a = 0; a < dim; ++a) g[a] += c * term.wavevector[a];
    }
    return g;
  };
  s.hessian = [=](const Point& p) {
    SymMatrix h = SymMatrix::Zero(dim, dim);
    for (const auto& term : *shared) {
      const double v = -term.amplitude * std::sin(phase_of(term, p));
      for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) h(a, b) += v * term.wavevector[a] * term.wavevector[b];
      }
    }
    return h;
  };
  return s;
}

ScalarSource t_profile(int dim, Profile profile, std::string id) {
  auto shared = std::make_shared<const Profile>(std::move(profile));
  ScalarSource s;
  s.dim = dim;
  s.id = std::move(id);
  s.value = [shared](const Point& p) { return shared->f(p[0]); };
  s.gradient = [shared, dim](const Point& p) {
    Covector g = Covector::Zero(dim);
    g[0] = shared->df(p[0]);
    return g;
  };
  s.hessian = [shared, dim](const Point& p) {
    SymMatrix h = SymMatrix::Zero(dim, dim);
    h(0, 0) = shared->d2f(p[0]);
    return h;
  };
  return s;
}

namespace {

void require_same_dim(const ScalarSource& a, const ScalarSource& b) {
  if (a.dim != b.dim) throw Error(ErrorCode::kShapeMismatch, "scalar sources differ in dimension");
}

}  // namespace

ScalarSource sum(const ScalarSource& a, const ScalarSource& b) {
  require_same_dim(a, b);
  ScalarSource s;
  s.dim = a.dim;
  s.id = "(" + a.id + "+" + b.id + ")";
  s.value = [a, b](const Point& p) { return a.value(p) + b.value(p); };
  if (a.has_gradient() && b.has_gradient()) {
    s.gradient = [a, b](const Point& p) { return Covector(a.gradient(p) + b.gradient(p)); };
  }
  if (a.has_hessian() && b.has_hessian()) {
    s.hessian = [a, b](const Point& p) { return SymMatrix(a.hessian(p) + b.hessian(p)); };
  }
  return s;
}

ScalarSource product(const ScalarSource& a, const ScalarSource& b) {
  require_same_dim(a, b);
  ScalarSource s;
  s.dim = a.dim;
  s.id = "(" + a.id + "*" + b.id + ")";
  s.value = [a, b](const Point& p) { return a.value(p) * b.value(p); };
  if (a.has_gradient() && b.has_gradient()) {
    s.gradient = [a, b](const Point& p) {
      return Covector(a.gradient(p) * b.value(p) + a.value(p) * b.gradient(p));
    };
    if (a.has_hessian() && b.has_hessian()) {
      s.hessian = [a, b](const Point& p) {
        const Covector ga = a.gradient(p);
        const Covector gb = b.gradient(p);
        return SymMatrix(a.hessian(p) * b.value(p) + a.value(p) * b.hessian(p) +
                         ga * gb.transpose() + gb * ga.transpose());
      };
    }
  }
  return s;
}

ScalarSource affine(double offset, double scale, const ScalarSource& a) {
  ScalarSource s;
  s.dim = a.dim;
  s.id = a.id;
  s.value = [=](const Point& p) { return offset + scale * a.value(p); };
  if (a.has_gradient()) {
    s.gradient = [=](const Point& p) { return Covector(scale * a.gradient(p)); };
  }
  if (a.has_hessian()) {
    s.hessian = [=](const Point& p) { return SymMatrix(scale * a.hessian(p)); };
  }
  return s;
}

ScalarSource power(const ScalarSource& a, double exponent) {
  ScalarSource s;
  s.dim = a.dim;
  s.id = a.id + "^" + std::to_string(exponent);
  s.value = [=](const Point& p) { return std::pow(a.value(p), exponent); };
  if (a.has_gradient()) {
    s.gradient = [=](const Point& p) {
      const double v = a.value(p);
      return Covector(exponent * std::pow(v, exponent - 1.0) * a.gradient(p));
    };
    if (a.has_hessian()) {
      s.hessian = [=](const Point& p) {
        const double v = a.value(p);
        const Covector g = a.gradient(p);
        return SymMatrix(exponent * std::pow(v, exponent - 1.0) * a.hessian(p) +
                         exponent * (exponent - 1.0) * std::pow(v, exponent - 2.0) * g *
                             g.transpose());
      };
    }
  }
  return s;
}

namespace {

std::vector<double> random_wavevector(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> tfreq(-std::numbers::pi, std::numbers::pi);
  std::uniform_int_distribution<int> afreq(-1, 1);
  std::vector<double> k(dim);
  k[0] = tfreq(rng);
  for (int a = 1; a < dim; ++a) k[a] = afreq(rng);
  return k;
}

}  // namespace

ScalarSource random_trig_scalar(int dim, std::mt19937_64& rng, double offset, double amplitude,
                                int terms) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<TrigTerm> list;
  for (int m = 0; m < terms; ++m) {
    list.push_back({amplitude * unit(rng) / terms, random_wavevector(dim, rng), phase(rng)});
  }
  return trig_series(dim, offset, std::move(list), "random_trig");
}

MetricSource flat_metric(int dim) {
  return constant_metric(SymMatrix::Identity(dim, dim), "flat");
}

MetricSource constant_metric(const SymMatrix& g, std::string id) {
  const int dim = static_cast<int>(g.rows());
  MetricSource m;
  m.dim = dim;
  m.id = std::move(id);
  m.value = [g](const Point&) { return g; };
  m.derivative = [dim](const Point&, int) { return SymMatrix(SymMatrix::Zero(dim, dim)); };
  return m;
}

MetricSource random_smooth_metric(int dim, std::uint64_t seed, double amplitude, int terms) {
  if (!(amplitude >= 0.0 && amplitude < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "random metric amplitude must lie in [0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  struct Mode {
    SymMatrix coefficient;
    std::vector<double> k;
    double phase;
  };
  auto modes = std::make_shared<std::vector<Mode>>();
  // Frobenius norm of each coefficient is at most amplitude / terms.
  const double entry_scale = amplitude / (terms * dim);
  for (int m = 0; m < terms; ++m) {
    SymMatrix c(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) c(i, j) = entry_scale * unit(rng);
    }
    modes->push_back({c, random_wavevector(dim, rng), phase(rng)});
  }
  auto arg = [dim](const Mode& mode, const Point& p) {
    double a = mode.phase;
    for (int i = 0; i < dim; ++i) a += mode.k[i] * p[i];
    return a;
  };
  auto factor = [=](const Point& p) {
    SymMatrix l = SymMatrix::Identity(dim, dim);
    for (const auto& mode : *modes) l += mode.coefficient * std::sin(arg(mode, p));
    return l;
  };
  MetricSource metric;
  metric.dim = dim;
  metric.id = "random_smooth(seed=" + std::to_string(seed) + ")";
  metric.value = [=](const Point& p) {
    const SymMatrix l = factor(p);
    return SymMatrix(l * l.transpose());
  };
  metric.derivative = [=](const Point& p, int axis) {
    const SymMatrix l = factor(p);
    SymMatrix dl = SymMatrix::Zero(dim, dim);
    for (const auto& mode : *modes) {
      dl += mode.coefficient * (std::cos(arg(mode, p)) * mode.k[axis]);
    }
    return SymMatrix(dl * l.transpose() + l * dl.transpose());
  };
  return metric;
}

}  // namespace calderon
