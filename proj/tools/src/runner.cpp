#include "calderon_cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>

#include "calderon/conformal.hpp"
#include "calderon/counterexample.hpp"
#include "calderon/dataset_io.hpp"
#include "calderon/dn_solver.hpp"
#include "calderon/error.hpp"
#include "calderon/gauge.hpp"
#include "calderon/miller.hpp"

namespace calderon::cli {

namespace {

using Clock = std::chrono::steady_clock;

Error invalid(const std::string& message) { return Error(ErrorCode::kConfigInvalid, message); }

template <typename T>
T param(const ExperimentConfig& config, const char* key, T fallback) {
  if (!config.section.contains(key)) return fallback;
  try {
    return config.section.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw invalid(std::string("params.") + key + " has the wrong type");
  }
}

void allow_params(const ExperimentConfig& config, const std::set<std::string>& allowed) {
  for (const auto& item : config.section.items()) {
    if (!allowed.count(item.key())) throw invalid("unknown key '" + item.key() + "' in params");
  }
}

class Stopwatch {
 public:
  explicit Stopwatch(std::map<std::string, double>& sink, std::string name)
      : sink_(sink), name_(std::move(name)), start_(Clock::now()) {}
  ~Stopwatch() { sink_[name_] += std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  std::map<std::string, double>& sink_;
  std::string name_;
  Clock::time_point start_;
};

ExperimentReport make_report(const ExperimentConfig& config) {
  ExperimentReport r;
  r.command = config.command;
  r.inputs_digest = digest(config.raw);
  return r;
}

std::vector<int> refinements_or(const ExperimentConfig& config, std::vector<int> fallback) {
  auto levels = config.refinements.empty() ? std::move(fallback) : config.refinements;
  if (levels.size() < 2) throw invalid("refinements needs at least two levels");
  if (!std::is_sorted(levels.begin(), levels.end())) throw invalid("refinements must be increasing");
  return levels;
}

double spacing(const CylinderGrid& grid) { return grid.spacing(0); }

/// Metric for sample k: random_smooth specs get seed + k, others are shared.
MetricSource metric_for_sample(const ExperimentConfig& config, int k) {
  nlohmann::json spec = config.metric;
  if (spec.value("kind", "flat") == "dataset") throw invalid("this command needs an analytic metric");
  if (spec.value("kind", "flat") == "random_smooth") {
    spec["seed"] = spec.value("seed", config.seed) + static_cast<std::uint64_t>(k);
  }
  return metric_from_spec(spec, config.dim);
}

MillerDataset dataset_from_param(const ExperimentConfig& config, double& synth_residual) {
  synth_residual = std::nan("");
  const auto name = param<std::string>(config, "dataset", "");
  if (name == "zero") {
    const CylinderGrid grid = config.grid_for(config.nt);
    if (grid.dim() != 3) throw invalid("the zero dataset needs a 3-D grid");
    return MillerDataset::zeros(grid, 1.0, 1.0 / 6.0, 0.5);
  }
  if (!name.empty()) return load_dataset(config.resolve(name)).data;
  const SynthResult s = synth_approx_miller(
      synth_params_from_spec(param<nlohmann::json>(config, "synth", nlohmann::json::object())));
  synth_residual = s.residual;
  return s.data;
}

/// c = 1 + amplitude * bump(t) * S(t, x) with S a random trig sum, so c = 1 near both ends.
ScalarSource collar_factor(int dim, const nlohmann::json& spec, std::uint64_t seed) {
  if (!spec.is_object()) throw invalid("params.factor must be an object");
  const double amplitude = spec.value("amplitude", 0.3);
  const double lo = spec.value("lo", 0.2);
  const double hi = spec.value("hi", 0.8);
  if (!(amplitude >= 0.0 && amplitude < 1.0)) throw invalid("factor.amplitude must lie in [0, 1)");
  if (!(0.0 < lo && lo < hi && hi < 1.0)) throw invalid("factor collar needs 0 < lo < hi < 1");
  std::mt19937_64 rng(seed);
  const ScalarSource s = random_trig_scalar(dim, rng, 0.0, 1.0, spec.value("terms", 3));
  return affine(1.0, amplitude, product(t_profile(dim, bump_profile(lo, hi)), s));
}

void add_orders(ExperimentReport& report, const std::string& prefix, const std::vector<double>& gaps,
                const std::vector<double>& h, double lower, double upper) {
  const auto orders = observed_orders(gaps, h);
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const std::string rule = prefix + ".order_" + std::to_string(i);
    report.scalars[rule] = orders[i];
    report.verdicts.push_back(std::isfinite(upper) ? check_within(rule, orders[i], lower, upper)
                                                   : check_at_least(rule, orders[i], lower));
  }
}

void add_validation_verdicts(ExperimentReport& report, const ValidationReport& v, const std::string& prefix) {
  if (const auto* c = v.find("vanishing")) {
    report.verdicts.push_back(check_at_most(prefix + ".vanishing", c->values.at("max_abs"), 1e-12));
  }
  if (const auto* c = v.find("holder")) {
    const auto it = c->values.find("growth_rho");
    const double growth = it == c->values.end() ? 1.0 : it->second;
    report.verdicts.push_back(check_at_most(prefix + ".holder_growth", growth, ValidationOptions{}.holder_growth_limit));
  }
  if (const auto* c = v.find("ellipticity")) {
    const double alpha = c->values.at("alpha");
    report.verdicts.push_back(check_at_least(prefix + ".lambda_min", c->values.at("lambda_min"), alpha));
    report.verdicts.push_back(check_at_most(prefix + ".lambda_max", c->values.at("lambda_max"), 1.0 / alpha));
  }
  report.details["validation"] = v.to_json();
}

}  // namespace

std::vector<double> observed_orders(const std::vector<double>& errors, const std::vector<double>& h) {
  if (errors.size() != h.size()) throw Error(ErrorCode::kShapeMismatch, "errors and h differ in length");
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    orders.push_back(std::log(errors[i] / errors[i + 1]) / std::log(h[i] / h[i + 1]));
  }
  return orders;
}

ExperimentReport run_verify_identities(const ExperimentConfig& config) {
  allow_params(config, {"identity_tuples", "scaling_tuples", "amplitude", "analytic_potential"});
  if (config.dim < 3) throw invalid("verify-identities needs dim >= 3");
  const int identity_tuples = param<int>(config, "identity_tuples", 20);
  const int scaling_tuples = param<int>(config, "scaling_tuples", config.samples);
  const double amplitude = param<double>(config, "amplitude", 0.3);
  if (!(amplitude > 0.0 && amplitude <= 0.5)) throw invalid("params.amplitude must lie in (0, 0.5]");
  PotentialOptions potential;
  potential.analytic = param<bool>(config, "analytic_potential", true);
  const auto levels = refinements_or(config, {9, 17, 33});

  ExperimentReport report = make_report(config);
  struct Tuple {
    MetricSource g;
    ScalarSource c, u, w;
  };
  std::vector<Tuple> tuples;
  for (int k = 0; k < std::max(identity_tuples, scaling_tuples); ++k) {
    std::mt19937_64 rng(config.seed * 1000003ULL + static_cast<std::uint64_t>(k));
    Tuple t{metric_for_sample(config, k), {}, {}, {}};
    t.c = random_trig_scalar(config.dim, rng, 1.0, amplitude);
    t.u = random_trig_scalar(config.dim, rng, 0.0, 1.0);
    t.w = random_trig_scalar(config.dim, rng, 0.0, 1.0);
    tuples.push_back(std::move(t));
  }

  {
    Stopwatch sw(report.timings, "identity");
    const CylinderGrid grid = config.grid_for(config.nt);
    Table table{{"tuple", "max_error"}, {}};
    double worst = 0.0;
    for (int k = 0; k < identity_tuples; ++k) {
      const double e = algebraic_identity_check(tuples[k].g, tuples[k].c, tuples[k].u, tuples[k].w, grid);
      table.rows.push_back({static_cast<double>(k), e});
      worst = std::max(worst, e);
    }
    report.tables["identity"] = std::move(table);
    report.scalars["identity.max_error"] = worst;
    report.verdicts.push_back(check_at_most("identity.max_error", worst, config.tolerance("identity", 1e-12)));
  }

  {
    Stopwatch sw(report.timings, "scaling");
    Table table{{"tuple", "grid", "h", "residual"}, {}};
    for (int k = 0; k < scaling_tuples; ++k) {
      std::vector<double> residuals, h;
      for (int nt : levels) {
        const CylinderGrid grid = config.grid_for(nt);
        const MetricField g = sample_metric(tuples[k].g, grid);
        const ConformalFactor c(ScalarField::sample(tuples[k].c, grid), config.dim);
        const double r = scaling_law_residual(g, c, ScalarField::sample(tuples[k].u, grid), potential);
        residuals.push_back(r);
        h.push_back(spacing(grid));
        table.rows.push_back({static_cast<double>(k), grid.id(), h.back(), r});
      }
      add_orders(report, "scaling.tuple_" + std::to_string(k), residuals, h, config.tolerance("order_min", 1.7),
                 config.tolerance("order_max", 2.3));
    }
    report.tables["scaling"] = std::move(table);

    const CylinderGrid grid = config.grid_for(levels.back());
    const MetricField g = sample_metric(tuples[0].g, grid);
    const ConformalFactor one(ScalarField::constant(grid, 1.0), config.dim);
    const double r = scaling_law_residual(g, one, ScalarField::sample(tuples[0].u, grid), potential);
    report.scalars["scaling.c_one_residual"] = r;
    report.verdicts.push_back(check_at_most("scaling.c_one_residual", r, config.tolerance("trivial", 1e-10)));
  }
  return report;
}

ExperimentReport run_dn_compare(const ExperimentConfig& config) {
  allow_params(config, {"mode", "gamma_a", "gamma_b", "factor", "diffeo", "min_order"});
  const auto gamma_a = param<std::string>(config, "gamma_a", config.gamma);
  const auto gamma_b = param<std::string>(config, "gamma_b", config.gamma);
  if (gamma_a != gamma_b) throw invalid("dn-compare needs matching boundary sets, got " + gamma_a + " and " + gamma_b);
  Boundary gamma;
  try {
    gamma = boundary_from_string(gamma_a);
  } catch (const Error&) {
    throw invalid("unknown boundary set " + gamma_a);
  }
  const auto mode = param<std::string>(config, "mode", "conformal");
  const double min_order = param<double>(config, "min_order", config.tolerance("order_min", 1.5));
  const double trivial_tol = config.tolerance("trivial", 1e-10);
  const nlohmann::json factor_spec = param<nlohmann::json>(config, "factor", nlohmann::json::object());

  ExperimentReport report = make_report(config);
  report.details["mode"] = mode;
  report.details["gamma"] = to_string(gamma);
  Table table{{"grid", "h", "gap_lowmode", "gap_frobenius"}, {}};
  std::vector<double> gaps, h;
  double trivial = 0.0;
  const MetricSource g = metric_for_sample(config, 0);

  if (mode == "conformal") {
    if (config.dim < 3) throw invalid("mode conformal needs dim >= 3");
    const auto levels = refinements_or(config, {17, 25, 33});
    const ScalarSource c = collar_factor(config.dim, factor_spec, config.seed);
    PotentialOptions analytic;
    analytic.analytic = true;
    for (int nt : levels) {
      Stopwatch sw(report.timings, "grid_" + std::to_string(nt));
      const CylinderGrid grid = config.grid_for(nt);
      const MetricField gf = sample_metric(g, grid);
      const ConformalFactor cf(ScalarField::sample(c, grid), config.dim);
      const DNMatrix a = dn_map_partial(assemble_stiffness(scale_metric(gf, cf)), gamma);
      const DNMatrix b = dn_map_schrodinger(gf, conformal_potential(gf, cf, analytic).q, gamma);
      const OperatorGap gap = operator_gap(a, b, config.mode_cut);
      gaps.push_back(gap.lowmode_rel);
      h.push_back(spacing(grid));
      table.rows.push_back({grid.id(), h.back(), gap.lowmode_rel, gap.frobenius_rel});
    }
    Stopwatch sw(report.timings, "trivial");
    const CylinderGrid grid = config.grid_for(levels.front());
    const MetricField gf = sample_metric(g, grid);
    const ConformalFactor one(ScalarField::constant(grid, 1.0), config.dim);
    const DNMatrix a = dn_map_partial(assemble_stiffness(scale_metric(gf, one)), gamma);
    const DNMatrix b = dn_map_schrodinger(gf, conformal_potential(gf, one, analytic).q, gamma);
    trivial = operator_gap(a, b, config.mode_cut).frobenius_rel;
  } else if (mode == "conformal2d") {
    if (config.dim != 2) throw invalid("mode conformal2d needs dim = 2");
    const auto levels = refinements_or(config, {17, 33, 65});
    const ScalarSource c = collar_factor(2, factor_spec, config.seed);
    for (int nt : levels) {
      Stopwatch sw(report.timings, "grid_" + std::to_string(nt));
      const CylinderGrid grid = config.grid_for(nt);
      const MetricField gf = sample_metric(g, grid).without_source();
      const ConformalFactor cf(ScalarField::sample(c, grid).without_source(), 2);
      const DNMatrix a = dn_map_partial(assemble_stiffness(scale_metric_2d(gf, cf)), gamma);
      const DNMatrix b = dn_map_partial(assemble_stiffness(gf), gamma);
      const OperatorGap gap = operator_gap(a, b, config.mode_cut);
      gaps.push_back(gap.lowmode_rel);
      h.push_back(spacing(grid));
      table.rows.push_back({grid.id(), h.back(), gap.lowmode_rel, gap.frobenius_rel});
    }
    const CylinderGrid grid = config.grid_for(levels.front());
    const MetricField gf = sample_metric(g, grid).without_source();
    const ConformalFactor one(ScalarField::constant(grid, 1.0), 2);
    trivial = operator_gap(dn_map_partial(assemble_stiffness(scale_metric_2d(gf, one)), gamma),
                           dn_map_partial(assemble_stiffness(gf), gamma), config.mode_cut)
                  .frobenius_rel;
  } else if (mode == "diffeo") {
    const auto levels = refinements_or(config, config.dim == 2 ? std::vector<int>{17, 33, 65}
                                                               : std::vector<int>{9, 17, 25});
    const CylinderDiffeo phi = diffeo_from_spec(
        param<nlohmann::json>(config, "diffeo",
                              {{"s_spec", {{"family", "bump"}, {"amplitude", 0.1}}}}),
        config.dim);
    std::vector<CylinderGrid> grids;
    for (int nt : levels) grids.push_back(config.grid_for(nt));
    {
      Stopwatch sw(report.timings, "gaps");
      for (const GapRow& row : diffeo_invariance_gap(g, phi, gamma, grids, config.mode_cut)) {
        gaps.push_back(row.lowmode_rel);
        h.push_back(row.h);
        table.rows.push_back({row.grid, row.h, row.lowmode_rel, row.frobenius_rel});
      }
    }
    const auto rows = diffeo_invariance_gap(g, CylinderDiffeo::identity(config.dim, phi.delta()), gamma,
                                            {grids.front()}, config.mode_cut);
    trivial = rows.front().frobenius_rel;
    report.details["diffeo"] = phi.id();
  } else {
    throw invalid("unknown dn-compare mode " + mode);
  }

  report.tables["gaps"] = std::move(table);
  add_orders(report, mode, gaps, h, min_order, INFINITY);
  report.scalars[mode + ".trivial_gap"] = trivial;
  report.verdicts.push_back(check_at_most(mode + ".trivial_gap", trivial, trivial_tol));
  return report;
}

ExperimentReport run_counterexample_study(const ExperimentConfig& config) {
  allow_params(config, {"dataset", "synth", "factors", "n", "extra_angular", "volume_eps", "volume_eps_alt", "min_r2"});
  ExperimentReport report = make_report(config);
  double synth_residual;
  MillerDataset data = [&] {
    Stopwatch sw(report.timings, "dataset");
    return dataset_from_param(config, synth_residual);
  }();
  if (std::isfinite(synth_residual)) report.scalars["synth.residual"] = synth_residual;

  GapStudyParams params;
  if (!config.eps.empty()) params.eps = config.eps;
  params.factors = param<std::vector<int>>(config, "factors", params.factors);
  params.n = param<int>(config, "n", params.n);
  params.extra_angular = param<int>(config, "extra_angular", params.extra_angular);
  params.mode_cut = config.mode_cut;
  for (int f : params.factors) {
    if (f < 1 || !data.grid.can_coarsen(f)) throw invalid("factor " + std::to_string(f) + " does not divide the dataset grid");
  }
  const double trivial_tol = config.tolerance("trivial", 1e-10);

  GapStudy study = [&] {
    Stopwatch sw(report.timings, "gap_study");
    return dn_gap_study(data, params);
  }();
  Table table{{"eps", "factor", "grid", "h", "gap_lowmode", "gap_frobenius", "harmonic_residual",
               "harmonic_residual_max", "weak_residual", "boundary_defect"},
              {}};
  double max_gap = 0.0;
  for (const auto& row : study.rows) {
    table.rows.push_back({row.eps, static_cast<double>(row.factor), row.grid, row.h, row.gap_lowmode, row.gap_frobenius,
                          row.harmonic_residual, row.harmonic_residual_max, row.weak_residual, row.boundary_defect});
    max_gap = std::max({max_gap, row.gap_lowmode, row.gap_frobenius});
  }
  report.tables["gap_study"] = std::move(table);
  report.details["gap_study"] = to_json(study);

  bool trivial_u = true;
  for (double v : data.u) trivial_u = trivial_u && v == 0.0;
  if (trivial_u) {
    report.scalars["zero_dataset.max_gap"] = max_gap;
    report.verdicts.push_back(check_at_most("zero_dataset.max_gap", max_gap, trivial_tol));
    report.details["nonisometry"] = "skipped: TrivialU";
    return report;
  }

  {
    Stopwatch sw(report.timings, "eps_zero");
    GapStudyParams zero = params;
    zero.eps = {0.0};
    zero.factors = {params.factors.front()};
    const GapStudy z = dn_gap_study(data, zero);
    const double gap = std::max(z.rows.front().gap_lowmode, z.rows.front().gap_frobenius);
    report.scalars["eps_zero.gap"] = gap;
    report.verdicts.push_back(check_at_most("eps_zero.gap", gap, trivial_tol));
  }

  const Regression& reg = study.regression;
  report.scalars["regression.coef_eps_r"] = reg.coef_eps_r;
  report.scalars["regression.coef_eps2"] = reg.coef_eps2;
  report.scalars["regression.r_squared"] = reg.r_squared;
  report.verdicts.push_back(check_greater("regression.coef_eps_r", reg.coef_eps_r, 0.0));
  report.verdicts.push_back(check_greater("regression.coef_eps2", reg.coef_eps2, 0.0));
  report.verdicts.push_back(
      check_at_least("regression.r_squared", reg.r_squared, param<double>(config, "min_r2", config.tolerance("r_squared", 0.9))));

  if (params.n == 3) {
    Stopwatch sw(report.timings, "nonisometry");
    const NonIsometryReport a = nonisometry_check(data, param<std::vector<double>>(config, "volume_eps", {}));
    report.scalars["nonisometry.p2"] = a.p2;
    report.scalars["nonisometry.expected_p2"] = a.expected_p2;
    report.scalars["nonisometry.relative_difference"] = a.relative_difference;
    report.verdicts.push_back(check_greater("nonisometry.p2", a.p2, 0.0));
    report.verdicts.push_back(
        check_at_most("nonisometry.relative_difference", a.relative_difference, config.tolerance("p2", 1e-10)));
    std::vector<double> alt = param<std::vector<double>>(config, "volume_eps_alt", {});
    if (alt.empty()) {
      double umax = 0.0;
      for (double v : data.u) umax = std::max(umax, std::abs(v));
      for (int k = -3; k <= 3; ++k) alt.push_back(0.45 * k / (3.0 * umax));
    }
    const NonIsometryReport b = nonisometry_check(data, alt);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < a.coefficients.size(); ++i) {
      scale = std::max(scale, std::abs(a.coefficients[i]));
      diff = std::max(diff, std::abs(a.coefficients[i] - b.coefficients[i]));
    }
    report.scalars["nonisometry.coefficient_drift"] = diff / scale;
    report.verdicts.push_back(
        check_at_most("nonisometry.coefficient_drift", diff / scale, config.tolerance("p2", 1e-10)));
    Table coefs{{"power", "coefficient", "coefficient_alt"}, {}};
    for (std::size_t i = 0; i < a.coefficients.size(); ++i) {
      coefs.rows.push_back({static_cast<double>(i), a.coefficients[i], b.coefficients[i]});
    }
    report.tables["volume_polynomial"] = std::move(coefs);
  }
  return report;
}

ExperimentReport run_validate_dataset(const ExperimentConfig& config) {
  allow_params(config, {"dataset", "vanishing_tol", "holder_growth_limit", "residual_tol"});
  const auto name = param<std::string>(config, "dataset", "");
  if (name.empty() || name == "zero") throw invalid("validate-dataset needs params.dataset");
  ExperimentReport report = make_report(config);
  const MillerDataset data = [&] {
    Stopwatch sw(report.timings, "load");
    return load_dataset(config.resolve(name)).data;
  }();
  ValidationOptions options;
  options.vanishing_tol = param<double>(config, "vanishing_tol", options.vanishing_tol);
  options.holder_growth_limit = param<double>(config, "holder_growth_limit", options.holder_growth_limit);
  options.residual_tol = param<double>(config, "residual_tol", options.residual_tol);
  Stopwatch sw(report.timings, "validate");
  const ValidationReport v = validate_miller_properties(data, options);
  Table table{{"item", "status", "code", "detail"}, {}};
  for (const auto& c : v.checks) {
    table.rows.push_back({c.item, c.status, c.code, c.detail});
    for (const auto& [key, value] : c.values) report.scalars[c.item + "." + key] = value;
  }
  report.tables["checks"] = std::move(table);
  add_validation_verdicts(report, v, "validation");
  for (auto& verdict : report.verdicts) {
    if (verdict.rule == "validation.vanishing") verdict = check_at_most(verdict.rule, verdict.value, options.vanishing_tol);
    if (verdict.rule == "validation.holder_growth") {
      verdict = check_at_most(verdict.rule, verdict.value, options.holder_growth_limit);
    }
  }
  return report;
}

ExperimentReport run_synth_dataset(const ExperimentConfig& config) {
  allow_params(config, {"synth", "output", "encoding"});
  const SynthParams params =
      synth_params_from_spec(param<nlohmann::json>(config, "synth", nlohmann::json::object()));
  const auto encoding_name = param<std::string>(config, "encoding", "auto");
  ArrayEncoding encoding = ArrayEncoding::kAuto;
  if (encoding_name == "base64") {
    encoding = ArrayEncoding::kBase64;
  } else if (encoding_name == "nested") {
    encoding = ArrayEncoding::kNested;
  } else if (encoding_name != "auto") {
    throw invalid("params.encoding must be auto, base64 or nested");
  }
  ExperimentReport report = make_report(config);
  const SynthResult s = [&] {
    Stopwatch sw(report.timings, "synthesize");
    return synth_approx_miller(params);
  }();
  const std::filesystem::path out = config.output_dir / param<std::string>(config, "output", "dataset.json");
  std::filesystem::create_directories(out.parent_path());
  save_dataset(s.data, out, encoding);
  report.details["dataset"] = out.filename().string();
  report.scalars["baseline_residual"] = s.baseline_residual;
  report.scalars["residual"] = s.residual;
  report.scalars["residual_max"] = s.residual_max;
  report.scalars["linearization_defect"] = s.linearization_defect;
  report.scalars["coefficient_bound"] = s.coefficient_bound;
  report.scalars["iterations"] = s.iterations;
  report.verdicts.push_back(check_at_most("synth.residual_ratio", s.residual / s.baseline_residual, 1.0));
  report.verdicts.push_back(check_at_most("synth.linearization_defect", s.linearization_defect,
                                          config.tolerance("linearization", 1e-8)));
  add_validation_verdicts(report, validate_miller_properties(s.data), "validation");
  return report;
}

ExperimentReport run_rigidity_check(const ExperimentConfig& config) {
  allow_params(config, {});
  ExperimentReport report = make_report(config);
  const CylinderGrid grid = config.grid_for(config.nt);
  Table table{{"sample", "metric", "max_deviation"}, {}};
  double worst = 0.0;
  auto record = [&](int k, const MetricField& g) {
    const double d = global_rigidity_check(g);
    table.rows.push_back({static_cast<double>(k), g.id(), d});
    worst = std::max(worst, d);
  };
  Stopwatch sw(report.timings, "rigidity");
  if (config.metric.value("kind", "") == "dataset") {
    const MillerDataset data = load_dataset(config.resolve(config.metric.at("path").get<std::string>())).data;
    record(0, assemble_counterexample_metric_3d(data, data.grid));
  } else {
    for (int k = 0; k < config.samples; ++k) record(k, sample_metric(metric_for_sample(config, k), grid));
  }
  report.tables["rigidity"] = std::move(table);
  report.scalars["rigidity.max_deviation"] = worst;
  report.verdicts.push_back(check_at_most("rigidity.max_deviation", worst, config.tolerance("rigidity", 1e-10)));
  return report;
}

ExperimentReport run(const ExperimentConfig& config) {
  const auto start = Clock::now();
  ExperimentReport report;
  if (config.command == "verify-identities") {
    report = run_verify_identities(config);
  } else if (config.command == "dn-compare") {
    report = run_dn_compare(config);
  } else if (config.command == "counterexample-study") {
    report = run_counterexample_study(config);
  } else if (config.command == "validate-dataset") {
    report = run_validate_dataset(config);
  } else if (config.command == "synth-dataset") {
    report = run_synth_dataset(config);
  } else if (config.command == "rigidity-check") {
    report = run_rigidity_check(config);
  } else {
    throw invalid("unknown command " + config.command);
  }
  report.timings["total"] = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

}  // namespace calderon::cli
