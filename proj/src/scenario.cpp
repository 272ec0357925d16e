#include "delaylab/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "delaylab/io.hpp"
#include "delaylab/rng.hpp"

namespace delaylab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kFourCornerLambda = 1.0 / 3.0;
const double kFourCornerDim = std::log(4.0) / std::log(3.0);

Observable observable_for(const ScenarioConfig& cfg, const SystemSpec& sys, int k,
                          const std::vector<double>* alpha) {
  MonomialBasis basis = probe_basis(sys.ambient_dim, k, -1, domain_box(sys));
  Observable h = make_observable(cfg.base_observable, std::move(basis));
  if (alpha != nullptr && !alpha->empty()) h = perturb(h, *alpha);
  return h;
}

EmbeddedCloud embed_for(const ScenarioConfig& cfg, const SystemSpec& sys,
                        const PointCloud& cloud, int k, const std::vector<double>* alpha) {
  return build_embedded(cloud, sys, observable_for(cfg, sys, k, alpha), k);
}

// Occupancy-floored scan ladder: the bottom scale keeps the median ball at
// >= 20 members so sigma estimates stay meaningful (below the nearest-
// neighbor spacing every ball is a singleton and sigma is trivially 0).
std::vector<double> scan_ladder(const EmbeddedCloud& ec, int n_scales) {
  return make_ladder(ec.u_view(), n_scales).r;
}

std::vector<std::vector<double>> alphas_for(const ScenarioConfig& cfg, int m) {
  std::vector<std::vector<double>> out;
  if (cfg.alpha_mode == "fixed") {
    out.push_back(cfg.alpha_fixed);
  } else if (cfg.alpha_mode == "sampled") {
    for (int i = 0; i < cfg.alpha_count; ++i)
      out.push_back(sample_alpha(m, cfg.alpha_radius, cfg.alpha_seed + static_cast<std::uint64_t>(i)));
  } else {
    throw std::invalid_argument("unknown alpha mode: " + cfg.alpha_mode);
  }
  return out;
}

double diameter_of(const SoAView& v) { return sample_diameter(v); }

void write_curves(const std::string& dir, const std::string& tag, const SigmaScan& scan,
                  const std::vector<double>& deltas) {
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    ExceedanceCurve c = curve_from_scan(scan, deltas[d]);
    std::ofstream os(dir + "/curve_" + tag + "_d" + std::to_string(d) + ".csv");
    save_curve_csv(c, os);
  }
  // plot data at the smallest delta: log eps vs log fraction (zeros dropped)
  ExceedanceCurve c = curve_from_scan(scan, deltas.front());
  std::vector<double> lx, ly;
  for (std::size_t e = 0; e < c.eps.size(); ++e) {
    if (c.fraction[e] <= 0.0) continue;
    lx.push_back(std::log(c.eps[e]));
    ly.push_back(std::log(c.fraction[e]));
  }
  save_plot_data(lx, ly, dir + "/plot_" + tag + ".txt");
}

struct ScanSummary {
  std::vector<double> deltas;
  SigmaScan scan;
  Verdict verdict_at_min_delta;
  bool bounded_below_somewhere = false;
  std::size_t bounded_delta_index = 0;
};

ScanSummary run_scan(const ScenarioConfig& cfg, const EmbeddedCloud& ec) {
  ScanSummary s;
  s.deltas = delta_ladder(ec, cfg.delta_scales);
  auto ladder = scan_ladder(ec, cfg.eps_scales);
  s.scan = scan_sigmas(ec, ladder, cfg.n_queries, cfg.seed);
  const std::size_t n_eff = s.scan.n_queries();
  s.verdict_at_min_delta = predictability_verdict(curve_from_scan(s.scan, s.deltas.front()), n_eff);
  for (std::size_t d = 0; d < s.deltas.size(); ++d) {
    if (predictability_verdict(curve_from_scan(s.scan, s.deltas[d]), n_eff) ==
        Verdict::BoundedBelow) {
      s.bounded_below_somewhere = true;
      s.bounded_delta_index = d;
      break;
    }
  }
  return s;
}

// slab radius reaching the target-th nearest reconstruction neighbor
double slab_radius_for(const EmbeddedCloud& ec, std::size_t center, std::size_t target) {
  const std::size_t n = ec.size();
  std::vector<double> d2(n);
  double y[3];
  for (int d = 0; d < ec.k; ++d) y[d] = ec.u[static_cast<std::size_t>(d)][center];
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int d = 0; d < ec.k; ++d) {
      double e = ec.u[static_cast<std::size_t>(d)][j] - y[d];
      acc += e * e;
    }
    d2[j] = acc;
  }
  std::size_t t = std::min(target, n - 1);
  std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(t), d2.end());
  return std::sqrt(d2[t]);
}

std::vector<std::uint32_t> sampled_centers(const EmbeddedCloud& ec, int count,
                                           std::uint64_t seed) {
  std::vector<double> cum(ec.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < ec.size(); ++i) {
    acc += ec.phase.weight[i];
    cum[i] = acc;
  }
  Rng rng(split_seed(seed, 30));
  std::vector<std::uint32_t> centers(static_cast<std::size_t>(count));
  for (auto& c : centers) {
    double u = rng.uniform() * acc;
    std::size_t i = static_cast<std::size_t>(std::lower_bound(cum.begin(), cum.end(), u) -
                                             cum.begin());
    c = static_cast<std::uint32_t>(std::min(i, ec.size() - 1));
  }
  return centers;
}

// ---- scenario bodies ---------------------------------------------------

void run_dimension_solenoid(const ScenarioConfig& cfg, ScenarioResult& res) {
  PointCloud cloud = sample_srb(cfg.n_points, cfg.burn_in, cfg.seed);
  DimensionEstimate corr = correlation_dimension(cloud);
  HausdorffProxies prox = hausdorff_proxies(cloud, std::max(cfg.centers, 50), 0.05, 0.95,
                                            cfg.seed + 1);
  AlphaOutcome out;
  out.k = 0;
  out.details["correlation"] = dimension_to_json(corr);
  out.details["local_q05"] = prox.lower;
  out.details["local_q95"] = prox.upper;
  bool corr_ok = std::fabs(corr.value - 1.5) <= 0.1;
  bool local_ok = prox.lower >= 1.35 && prox.lower <= 1.65 && prox.upper >= 1.35 &&
                  prox.upper <= 1.65;
  out.pass = corr_ok && local_ok;
  out.verdict = out.pass ? "dimension-matched" : "dimension-mismatch";
  res.per_alpha.push_back(std::move(out));
  res.aggregate = {{"correlation", corr.value}, {"local_q05", prox.lower},
                   {"local_q95", prox.upper}};
  res.pass = res.per_alpha.back().pass;
}

void run_dimension_four_corner(const ScenarioConfig& cfg, ScenarioResult& res) {
  SystemSpec sys = parse_system(cfg.system_desc);
  PointCloud cloud = sample_self_similar(cfg.n_points, sys.lambda, cfg.seed);
  DimensionEstimate corr = correlation_dimension(cloud);
  DimensionEstimate box = box_counting_dimension(cloud);
  AlphaOutcome out;
  out.details["correlation"] = dimension_to_json(corr);
  out.details["box"] = dimension_to_json(box);
  bool ok = std::fabs(corr.value - kFourCornerDim) <= 0.08 &&
            std::fabs(box.value - kFourCornerDim) <= 0.1;
  out.pass = ok;
  out.verdict = ok ? "dimension-matched" : "dimension-mismatch";
  res.per_alpha.push_back(std::move(out));
  res.aggregate = {{"correlation", corr.value}, {"box", box.value},
                   {"expected", kFourCornerDim}};
  res.pass = ok;
}

void run_verdict_scenario(const ScenarioConfig& cfg, ScenarioResult& res,
                          const std::string& dir, Verdict wanted, int majority) {
  SystemSpec sys = parse_system(cfg.system_desc);
  PointCloud cloud = sample_measure(sys, cfg.n_points, cfg.seed, cfg.burn_in);
  const int k = cfg.ks.at(0);
  MonomialBasis basis = probe_basis(sys.ambient_dim, k, -1, domain_box(sys));
  auto alphas = alphas_for(cfg, basis.size());
  int hits = 0;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    AlphaOutcome out;
    out.k = k;
    out.alpha_index = static_cast<int>(a);
    try {
      EmbeddedCloud ec = embed_for(cfg, sys, cloud, k, &alphas[a]);
      ScanSummary s = run_scan(cfg, ec);
      if (!dir.empty()) write_curves(dir, "k" + std::to_string(k) + "_a" + std::to_string(a),
                                     s.scan, s.deltas);
      bool ok = false;
      if (wanted == Verdict::Collapses) {
        out.verdict = to_string(s.verdict_at_min_delta);
        ok = s.verdict_at_min_delta == Verdict::Collapses;
      } else {
        ok = s.bounded_below_somewhere;
        out.verdict = ok ? "bounded_below" : to_string(s.verdict_at_min_delta);
        out.details["delta_index"] = static_cast<int>(s.bounded_delta_index);
        out.details["delta"] = ok ? s.deltas[s.bounded_delta_index] : 0.0;
      }
      out.pass = ok;
      hits += ok ? 1 : 0;
    } catch (const std::exception& e) {
      out.error = e.what();
      res.partial = true;
    }
    res.per_alpha.push_back(std::move(out));
  }
  res.aggregate = {{"wanted", to_string(wanted)},
                   {"majority", majority},
                   {"achieved", hits},
                   {"of", alphas.size()}};
  res.pass = hits >= majority;
}

void run_upper_scaling(const ScenarioConfig& cfg, ScenarioResult& res, const std::string& dir) {
  SystemSpec sys = parse_system(cfg.system_desc);
  PointCloud cloud = sample_measure(sys, cfg.n_points, cfg.seed, cfg.burn_in);
  const int k = cfg.ks.at(0);
  MonomialBasis basis = probe_basis(sys.ambient_dim, k, -1, domain_box(sys));
  auto alphas = alphas_for(cfg, basis.size());
  const double min_slope = 0.5 - 0.2;
  int hits = 0;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    AlphaOutcome out;
    out.k = k;
    out.alpha_index = static_cast<int>(a);
    try {
      EmbeddedCloud ec = embed_for(cfg, sys, cloud, k, &alphas[a]);
      double diam_u = diameter_of(ec.u_view());
      double diam_x = diameter_of(ec.phase.view());
      CollisionReport probe = injectivity_probe(ec, 1e-3 * diam_u, 0.1 * diam_x,
                                                static_cast<std::size_t>(cfg.centers));
      out.details["collisions"] = probe.pairs.size();
      ScanSummary s = run_scan(cfg, ec);
      if (!dir.empty()) write_curves(dir, "k" + std::to_string(k) + "_a" + std::to_string(a),
                                     s.scan, s.deltas);
      ScalingFit chosen;
      double chosen_delta = 0.0;
      for (double d : s.deltas) {
        ScalingFit f = scaling_exponent(curve_from_scan(s.scan, d), s.scan.n_queries());
        if (f.usable) {
          chosen = f;
          chosen_delta = d;
          break;
        }
      }
      out.slope = chosen.fit.slope;
      out.details["delta"] = chosen_delta;
      out.details["fit"] = scaling_to_json(chosen);
      out.pass = chosen.usable && chosen.fit.slope >= min_slope && !probe.pairs.empty();
      out.verdict = out.pass ? "decays" : "no-decay";
      hits += out.pass ? 1 : 0;
    } catch (const std::exception& e) {
      out.error = e.what();
      res.partial = true;
    }
    res.per_alpha.push_back(std::move(out));
  }
  res.aggregate = {{"min_slope", min_slope}, {"achieved", hits}, {"of", alphas.size()},
                   {"majority", 6}};
  res.pass = hits >= 6;
}

void run_counterexample(const ScenarioConfig& cfg, ScenarioResult& res, const std::string& dir) {
  SystemSpec sys = parse_system(cfg.system_desc);
  PointCloud cloud = sample_srb(cfg.n_points, cfg.burn_in, cfg.seed);

  // algebraic one-step identity of the angle observable along the orbit
  double max_err = 0.0;
  {
    std::size_t m = std::min<std::size_t>(cloud.size(), 10000);
    std::size_t stride = cloud.size() / m;
    for (std::size_t i = 0; i < cloud.size(); i += stride) {
      PhasePoint p = cloud.point(i);
      double h0 = std::cos(p[0]);
      double inner = 2.0 * h0 * h0 - 1.0;
      double predicted = 2.0 * inner * inner - 1.0;
      double actual = std::cos(step(sys, p)[0]);
      max_err = std::max(max_err, std::fabs(predicted - actual));
    }
  }
  bool identity_ok = max_err <= 1e-10;

  bool all_ok = identity_ok;
  for (int k : cfg.ks) {
    AlphaOutcome out;
    out.k = k;
    try {
      EmbeddedCloud ec = embed_for(cfg, sys, cloud, k, nullptr);
      double diam_u = diameter_of(ec.u_view());
      double diam_x = diameter_of(ec.phase.view());
      CollisionReport probe = injectivity_probe(ec, 1e-3 * diam_u, 0.1 * diam_x,
                                                static_cast<std::size_t>(cfg.centers));
      std::vector<double> deltas = delta_ladder(ec, cfg.delta_scales);
      auto ladder = scan_ladder(ec, cfg.eps_scales);
      SigmaScan scan = scan_sigmas(ec, ladder, cfg.n_queries, cfg.seed);
      if (!dir.empty()) write_curves(dir, "k" + std::to_string(k), scan, deltas);
      int min_trailing = cfg.eps_scales;
      for (double d : deltas) {
        ExceedanceCurve c = curve_from_scan(scan, d);
        int trailing = 0;
        for (std::size_t e = 0; e < c.eps.size(); ++e) {
          if (c.fraction[e] == 0.0) ++trailing;
          else break;
        }
        min_trailing = std::min(min_trailing, trailing);
      }
      out.details["min_trailing_zero_scales"] = min_trailing;
      out.details["collisions"] = probe.pairs.size();
      out.details["max_identity_error"] = max_err;
      out.pass = min_trailing >= 2 && !probe.pairs.empty() && identity_ok;
      out.verdict = out.pass ? "error-vanishes" : "error-persists";
    } catch (const std::exception& e) {
      out.error = e.what();
      res.partial = true;
      out.pass = false;
    }
    all_ok = all_ok && out.pass;
    res.per_alpha.push_back(std::move(out));
  }
  res.aggregate = {{"max_identity_error", max_err}};
  res.pass = all_ok;
}

void run_slice_dimensions(const ScenarioConfig& cfg, ScenarioResult& res) {
  // four-corner, k = 1, one generic perturbation
  {
    SystemSpec sys = make_four_corner(kFourCornerLambda);
    PointCloud cloud = sample_self_similar(cfg.n_points, sys.lambda, cfg.seed);
    MonomialBasis basis = probe_basis(2, 1, -1, domain_box(sys));
    auto alpha = sample_alpha(basis.size(), cfg.alpha_radius, cfg.alpha_seed);
    ScenarioConfig sub = cfg;
    sub.base_observable = "zero";
    EmbeddedCloud ec = embed_for(sub, sys, cloud, 1, &alpha);
    auto centers = sampled_centers(ec, cfg.centers, cfg.seed + 2);
    std::vector<double> dims;
    for (std::uint32_t c : centers) {
      double y[3];
      for (int d = 0; d < ec.k; ++d) y[d] = ec.u[static_cast<std::size_t>(d)][c];
      double delta = slab_radius_for(ec, c, 600);
      try {
        SliceEstimate slice = geometric_slice(ec, y, delta);
        DimensionEstimate est = slice_dimension(slice, sys, 0);
        if (std::isfinite(est.value)) dims.push_back(est.value);
      } catch (const std::exception&) {
        // center skipped (thin slab)
      }
    }
    AlphaOutcome out;
    out.k = 1;
    out.alpha_index = 0;
    if (dims.size() >= 20) {
      double p10 = quantile(dims, 0.10);
      out.details["p10"] = p10;
      out.details["slices"] = dims.size();
      out.pass = p10 >= (kFourCornerDim - 1.0) - 0.15;
      out.verdict = out.pass ? "slice-dim-bounded" : "slice-dim-low";
      res.aggregate["four_corner_p10"] = p10;
    } else {
      out.error = "too few usable slices";
      res.partial = true;
    }
    res.per_alpha.push_back(std::move(out));
  }
  // solenoid, angle observable, k = 1: transverse fiber
  {
    SystemSpec sys = make_solenoid();
    PointCloud cloud = sample_srb(cfg.n_points, cfg.burn_in, cfg.seed + 3);
    ScenarioConfig sub = cfg;
    sub.base_observable = "cos_angle";
    EmbeddedCloud ec = embed_for(sub, sys, cloud, 1, nullptr);
    auto centers = sampled_centers(ec, 24, cfg.seed + 4);
    std::vector<double> dims;
    for (std::uint32_t c : centers) {
      double y[3];
      y[0] = ec.u[0][c];
      double delta = slab_radius_for(ec, c, 600);
      try {
        SliceEstimate slice = geometric_slice(ec, y, delta);
        DimensionEstimate est = slice_dimension(slice, sys, 0);
        if (std::isfinite(est.value)) dims.push_back(est.value);
      } catch (const std::exception&) {
      }
    }
    AlphaOutcome out;
    out.k = 1;
    if (dims.size() >= 8) {
      double med = quantile(dims, 0.5);
      out.details["median"] = med;
      out.details["slices"] = dims.size();
      out.pass = std::fabs(med - 0.5) <= 0.15;
      out.verdict = out.pass ? "fiber-dim-matched" : "fiber-dim-mismatch";
      res.aggregate["solenoid_median"] = med;
    } else {
      out.error = "too few usable slices";
      res.partial = true;
    }
    res.per_alpha.push_back(std::move(out));
  }
  res.pass = res.per_alpha.size() == 2 && res.per_alpha[0].pass && res.per_alpha[1].pass;
}

void run_absolute_continuity(const ScenarioConfig& cfg, ScenarioResult& res) {
  // below the dimension threshold the pushforward spreads out
  {
    SystemSpec sys = make_four_corner(kFourCornerLambda);
    PointCloud cloud = sample_self_similar(cfg.n_points, sys.lambda, cfg.seed);
    MonomialBasis basis = probe_basis(2, 1, -1, domain_box(sys));
    auto alpha = sample_alpha(basis.size(), cfg.alpha_radius, cfg.alpha_seed);
    ScenarioConfig sub = cfg;
    sub.base_observable = "zero";
    EmbeddedCloud ec = embed_for(sub, sys, cloud, 1, &alpha);
    DensityReport rep = pushforward_density_diagnostic(ec);
    AlphaOutcome out;
    out.k = 1;
    out.alpha_index = 0;
    out.details["growth"] = rep.growth;
    out.details["usable_levels"] = rep.usable_levels;
    out.pass = !rep.diverging && rep.usable_levels >= 3;
    out.verdict = rep.diverging ? "singular" : "spread-out";
    res.aggregate["below_growth"] = rep.growth;
    res.per_alpha.push_back(std::move(out));
  }
  // the angle observable on the solenoid concentrates on a curve
  {
    SystemSpec sys = make_solenoid();
    PointCloud cloud = sample_srb(cfg.n_points, cfg.burn_in, cfg.seed + 5);
    ScenarioConfig sub = cfg;
    sub.base_observable = "cos_angle";
    EmbeddedCloud ec = embed_for(sub, sys, cloud, 2, nullptr);
    DensityReport rep = pushforward_density_diagnostic(ec);
    AlphaOutcome out;
    out.k = 2;
    out.details["growth"] = rep.growth;
    out.details["usable_levels"] = rep.usable_levels;
    out.pass = rep.diverging;
    out.verdict = rep.diverging ? "singular" : "spread-out";
    res.aggregate["curve_growth"] = rep.growth;
    res.per_alpha.push_back(std::move(out));
  }
  res.pass = res.per_alpha[0].pass && res.per_alpha[1].pass;
}

void run_local_dim_projection(const ScenarioConfig& cfg, ScenarioResult& res) {
  struct Case {
    std::string system;
    std::string base;
    int k;
    double lo, hi;
  };
  const std::vector<Case> cases = {
      {"solenoid", "cos_angle", 1, 0.85, 1.15},
      {"solenoid", "cos_angle", 2, 1.35, 1.65},
      {describe(make_four_corner(kFourCornerLambda)), "zero", 2, 1.11, 1.41},
  };
  bool all_ok = true;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const Case& c = cases[ci];
    AlphaOutcome out;
    out.k = c.k;
    out.alpha_index = 0;
    try {
      SystemSpec sys = parse_system(c.system);
      PointCloud cloud = sample_measure(sys, cfg.n_points, cfg.seed + ci, cfg.burn_in);
      MonomialBasis basis = probe_basis(sys.ambient_dim, c.k, -1, domain_box(sys));
      auto alpha = sample_alpha(basis.size(), cfg.alpha_radius, cfg.alpha_seed + ci);
      ScenarioConfig sub = cfg;
      sub.base_observable = c.base;
      EmbeddedCloud ec = embed_for(sub, sys, cloud, c.k, &alpha);
      LocalDimPairs pairs = pushforward_local_dimension(ec, cfg.centers, cfg.seed + 10 + ci);
      out.details["mean_image"] = pairs.mean_image;
      out.details["mean_phase"] = pairs.mean_phase;
      out.details["expected"] = {c.lo, c.hi};
      out.pass = pairs.mean_image >= c.lo && pairs.mean_image <= c.hi;
      out.verdict = out.pass ? "projection-law" : "projection-off";
      res.aggregate[c.system + "_k" + std::to_string(c.k)] = pairs.mean_image;
    } catch (const std::exception& e) {
      out.error = e.what();
      res.partial = true;
    }
    all_ok = all_ok && out.pass;
    res.per_alpha.push_back(std::move(out));
  }
  res.pass = all_ok;
}

void run_iterate_chain(const ScenarioConfig& cfg, ScenarioResult& res, const std::string& dir) {
  SystemSpec sys = parse_system(cfg.system_desc);
  PointCloud cloud = sample_union_chain(cfg.n_points, sys, cfg.seed);
  DimensionEstimate head_dim = correlation_dimension(cloud);
  res.aggregate["head_dimension"] = head_dim.value;
  bool dim_ok = head_dim.value >= 2.1;

  const int k = cfg.ks.at(0);
  MonomialBasis basis = probe_basis(3, k, -1, domain_box(sys));
  auto alphas = alphas_for(cfg, basis.size());
  int hits = 0;
  bool density_diverges = false;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    AlphaOutcome out;
    out.k = k;
    out.alpha_index = static_cast<int>(a);
    try {
      EmbeddedCloud ec = embed_for(cfg, sys, cloud, k, &alphas[a]);
      ScanSummary s = run_scan(cfg, ec);
      if (!dir.empty()) write_curves(dir, "k" + std::to_string(k) + "_a" + std::to_string(a),
                                     s.scan, s.deltas);
      out.verdict = to_string(s.verdict_at_min_delta);
      out.pass = s.verdict_at_min_delta == Verdict::Collapses;
      hits += out.pass ? 1 : 0;
      if (a == 0) {
        DensityReport rep = pushforward_density_diagnostic(ec);
        density_diverges = rep.diverging;
        out.details["density_growth"] = rep.growth;
      }
    } catch (const std::exception& e) {
      out.error = e.what();
      res.partial = true;
    }
    res.per_alpha.push_back(std::move(out));
  }
  res.aggregate["collapse_count"] = hits;
  res.aggregate["density_diverges"] = density_diverges;
  res.aggregate["dim_ok"] = dim_ok;
  res.pass = dim_ok && hits >= 7 && density_diverges;
}

}  // namespace

json config_to_json(const ScenarioConfig& cfg) {
  return json{{"id", cfg.id},
              {"title", cfg.title},
              {"anchor", cfg.anchor},
              {"system", cfg.system_desc},
              {"base_observable", cfg.base_observable},
              {"alpha_mode", cfg.alpha_mode},
              {"alpha_count", cfg.alpha_count},
              {"alpha_radius", cfg.alpha_radius},
              {"alpha_seed", cfg.alpha_seed},
              {"alpha_fixed", cfg.alpha_fixed},
              {"ks", cfg.ks},
              {"n_points", cfg.n_points},
              {"n_queries", cfg.n_queries},
              {"burn_in", cfg.burn_in},
              {"seed", cfg.seed},
              {"eps_scales", cfg.eps_scales},
              {"delta_scales", cfg.delta_scales},
              {"centers", cfg.centers}};
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig cfg;
  cfg.id = j.at("id").get<std::string>();
  cfg.title = j.value("title", "");
  cfg.anchor = j.value("anchor", "");
  cfg.system_desc = j.at("system").get<std::string>();
  cfg.base_observable = j.value("base_observable", "zero");
  cfg.alpha_mode = j.value("alpha_mode", "sampled");
  cfg.alpha_count = j.value("alpha_count", 8);
  cfg.alpha_radius = j.value("alpha_radius", 1.0);
  cfg.alpha_seed = j.value("alpha_seed", std::uint64_t{101});
  cfg.alpha_fixed = j.value("alpha_fixed", std::vector<double>{});
  cfg.ks = j.value("ks", std::vector<int>{1});
  cfg.n_points = j.value("n_points", std::size_t{200000});
  cfg.n_queries = j.value("n_queries", std::size_t{10000});
  cfg.burn_in = j.value("burn_in", std::size_t{1000});
  cfg.seed = j.value("seed", std::uint64_t{7});
  cfg.eps_scales = j.value("eps_scales", 12);
  cfg.delta_scales = j.value("delta_scales", 6);
  cfg.centers = j.value("centers", 300);
  return cfg;
}

json result_to_json(const ScenarioResult& res) {
  json per = json::array();
  for (const auto& a : res.per_alpha) {
    json ja{{"k", a.k},         {"alpha_index", a.alpha_index}, {"verdict", a.verdict},
            {"pass", a.pass},   {"error", a.error},             {"details", a.details}};
    if (std::isfinite(a.slope)) ja["slope"] = a.slope;
    per.push_back(ja);
  }
  return json{{"schema", res.schema},   {"id", res.id},           {"pass", res.pass},
              {"partial", res.partial}, {"config", res.config_echo}, {"aggregate", res.aggregate},
              {"per_alpha", per}};
}

std::vector<ScenarioConfig> scenario_registry() {
  std::vector<ScenarioConfig> reg;
  const std::string four_corner = describe(make_four_corner(kFourCornerLambda));
  const std::string chain = describe(make_union_chain(0.4, 0.05));

  ScenarioConfig a1;
  a1.id = "A1";
  a1.title = "solenoid natural-measure dimension is 3/2";
  a1.anchor = "dimension-solenoid";
  a1.system_desc = "solenoid";
  a1.n_points = 100000;
  a1.centers = 150;
  reg.push_back(a1);

  ScenarioConfig a2;
  a2.id = "A2";
  a2.title = "four-corner set dimension matches log 4 / -log lambda";
  a2.anchor = "dimension-four-corner";
  a2.system_desc = four_corner;
  a2.n_points = 100000;
  reg.push_back(a2);

  ScenarioConfig v1;
  v1.id = "V1";
  v1.title = "prediction error collapses above the dimension threshold";
  v1.anchor = "predict-above-threshold";
  v1.system_desc = four_corner;
  v1.ks = {2};
  reg.push_back(v1);

  ScenarioConfig v2;
  v2.id = "V2";
  v2.title = "prediction error stays bounded below the dimension threshold";
  v2.anchor = "predict-below-threshold";
  v2.system_desc = four_corner;
  v2.ks = {1};
  reg.push_back(v2);

  ScenarioConfig v3;
  v3.id = "V3";
  v3.title = "exceedance decays at least at the box-dimension rate";
  v3.anchor = "upper-scaling";
  v3.system_desc = "solenoid";
  v3.base_observable = "cos_angle";
  v3.ks = {2};
  reg.push_back(v3);

  ScenarioConfig v4;
  v4.id = "V4";
  v4.title = "predictable angle observable despite non-injective reconstruction";
  v4.anchor = "counterexample-solenoid";
  v4.system_desc = "solenoid";
  v4.base_observable = "cos_angle";
  v4.alpha_mode = "fixed";
  v4.ks = {1, 2};
  v4.eps_scales = 14;
  reg.push_back(v4);

  ScenarioConfig v5;
  v5.id = "V5";
  v5.title = "slice dimensions obey the fiber lower bound";
  v5.anchor = "slice-dimension";
  v5.system_desc = four_corner;
  v5.n_points = 100000;
  reg.push_back(v5);

  ScenarioConfig v6;
  v6.id = "V6";
  v6.title = "pushforward density spreads below threshold, concentrates on curves";
  v6.anchor = "absolute-continuity";
  v6.system_desc = four_corner;
  reg.push_back(v6);

  ScenarioConfig v7;
  v7.id = "V7";
  v7.title = "reconstruction-space local dimension is min(k, phase local dimension)";
  v7.anchor = "local-dimension-projection";
  v7.system_desc = "solenoid";
  v7.n_points = 100000;
  v7.centers = 120;
  reg.push_back(v7);

  ScenarioConfig v8;
  v8.id = "V8";
  v8.title = "iterated images predict despite a high-dimensional source measure";
  v8.anchor = "iterate-chain";
  v8.system_desc = chain;
  v8.ks = {2};
  v8.n_points = 100000;
  reg.push_back(v8);

  return reg;
}

ScenarioConfig registry_config(const std::string& id) {
  for (auto& cfg : scenario_registry())
    if (cfg.id == id) return cfg;
  throw std::invalid_argument("unknown scenario id: " + id);
}

ScenarioConfig quick_variant(ScenarioConfig cfg) {
  cfg.n_points = std::max<std::size_t>(cfg.n_points / 10, 5000);
  cfg.n_queries = std::max<std::size_t>(cfg.n_queries / 5, 1000);
  cfg.alpha_count = std::min(cfg.alpha_count, 3);
  cfg.centers = std::min(cfg.centers, 60);
  return cfg;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
  ScenarioResult res;
  res.id = cfg.id;
  res.config_echo = config_to_json(cfg);
  std::string dir;
  if (!out_dir.empty()) {
    dir = out_dir + "/" + cfg.id;
    fs::create_directories(dir);
  }
  auto t0 = std::chrono::steady_clock::now();

  if (cfg.anchor == "dimension-solenoid") run_dimension_solenoid(cfg, res);
  else if (cfg.anchor == "dimension-four-corner") run_dimension_four_corner(cfg, res);
  else if (cfg.anchor == "predict-above-threshold")
    run_verdict_scenario(cfg, res, dir, Verdict::Collapses, 7);
  else if (cfg.anchor == "predict-below-threshold")
    run_verdict_scenario(cfg, res, dir, Verdict::BoundedBelow, 7);
  else if (cfg.anchor == "upper-scaling") run_upper_scaling(cfg, res, dir);
  else if (cfg.anchor == "counterexample-solenoid") run_counterexample(cfg, res, dir);
  else if (cfg.anchor == "slice-dimension") run_slice_dimensions(cfg, res);
  else if (cfg.anchor == "absolute-continuity") run_absolute_continuity(cfg, res);
  else if (cfg.anchor == "local-dimension-projection") run_local_dim_projection(cfg, res);
  else if (cfg.anchor == "iterate-chain") run_iterate_chain(cfg, res, dir);
  else throw std::invalid_argument("unknown scenario anchor: " + cfg.anchor);

  res.runtime_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!dir.empty()) {
    write_text_file(dir + "/result.json", result_to_json(res).dump(2) + "\n");
    json meta{{"runtime_sec", res.runtime_sec},
              {"written_at", static_cast<long long>(std::chrono::duration_cast<std::chrono::seconds>(
                                 std::chrono::system_clock::now().time_since_epoch())
                                 .count())}};
    write_text_file(dir + "/meta.json", meta.dump(2) + "\n");
  }
  return res;
}

std::string report(const std::string& results_dir) {
  std::ostringstream table;
  table << "scenario  k  alpha  verdict          slope      pass  error\n";
  std::vector<fs::path> result_files;
  if (fs::exists(results_dir))
    for (const auto& entry : fs::recursive_directory_iterator(results_dir))
      if (entry.is_regular_file() && entry.path().filename() == "result.json")
        result_files.push_back(entry.path());
  std::sort(result_files.begin(), result_files.end());
  for (const auto& path : result_files) {
    json j = json::parse(read_text_file(path.string()));
    for (const auto& a : j.at("per_alpha")) {
      table << j.at("id").get<std::string>() << "        " << a.at("k").get<int>() << "  "
            << a.at("alpha_index").get<int>() << "      ";
      std::string verdict = a.at("verdict").get<std::string>();
      verdict.resize(16, ' ');
      table << verdict << ' ';
      if (a.contains("slope")) {
        std::ostringstream s;
        s.precision(4);
        s << a.at("slope").get<double>();
        std::string sl = s.str();
        sl.resize(10, ' ');
        table << sl;
      } else {
        table << "-         ";
      }
      table << ' ' << (a.at("pass").get<bool>() ? "yes " : "no  ") << ' '
            << a.at("error").get<std::string>() << "\n";
    }
  }
  std::string text = table.str();
  if (fs::exists(results_dir)) write_text_file(results_dir + "/summary.txt", text);
  return text;
}

}  // namespace delaylab
