#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "delaylab/io.hpp"
#include "delaylab/scenario.hpp"

namespace {

using namespace delaylab;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitScenarioFailed = 4;

Observable resolve_observable(const std::string& spec, const PointCloud& cloud,
                              const SystemSpec& sys, int k, std::uint64_t perturb_seed,
                              double perturb_radius) {
  Observable h = [&] {
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
      return observable_from_json(nlohmann::json::parse(read_text_file(spec)));
    }
    MonomialBasis basis = probe_basis(cloud.dim, k, -1, domain_box(sys));
    return make_observable(spec, std::move(basis));
  }();
  if (perturb_radius > 0.0)
    h = perturb(h, sample_alpha(h.basis.size(), perturb_radius, perturb_seed));
  return h;
}

int cmd_sample(const std::string& system, std::size_t n, std::size_t burn_in,
               std::uint64_t seed, const std::string& out) {
  SystemSpec sys = parse_system(system);
  PointCloud cloud = sample_measure(sys, n, seed, burn_in);
  save_cloud_csv(cloud, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"delaylab: delay-coordinate reconstruction laboratory"};
  app.require_subcommand(1);

  // sample
  auto* sample = app.add_subcommand("sample", "sample an invariant/natural measure");
  std::string system = "solenoid", out_file = "cloud.csv";
  std::size_t n = 100000, burn_in = 1000;
  std::uint64_t seed = 7;
  sample->add_option("--system", system, "system descriptor, e.g. solenoid or four_corner:lambda=0.333...");
  sample->add_option("--n", n, "number of points")->required();
  sample->add_option("--burn-in", burn_in, "discarded leading iterates (orbit samplers)");
  sample->add_option("--seed", seed, "rng seed");
  sample->add_option("--out", out_file, "output cloud CSV")->required();

  // embed
  auto* embed = app.add_subcommand("embed", "build delay-coordinate pairs from a cloud");
  std::string embed_in, observable = "cos_angle", embed_out = "pairs.csv";
  int k = 2;
  std::uint64_t perturb_seed = 0;
  double perturb_radius = 0.0;
  embed->add_option("--in", embed_in, "input cloud CSV")->required();
  embed->add_option("--k", k, "delay dimension")->required();
  embed->add_option("--observable", observable, "builtin name or observable JSON file");
  embed->add_option("--perturb-radius", perturb_radius, "add a random monomial perturbation of this radius");
  embed->add_option("--perturb-seed", perturb_seed, "seed for the perturbation draw");
  embed->add_option("--out", embed_out, "output pairs CSV")->required();

  // sigma-scan
  auto* scan_cmd = app.add_subcommand("sigma-scan", "prediction-error exceedance scan");
  std::string scan_in, scan_out = "curve.csv", fit_out;
  double delta = 0.0;
  int eps_scales = 12;
  std::size_t queries = 10000;
  std::uint64_t scan_seed = 7;
  scan_cmd->add_option("--in", scan_in, "input pairs CSV")->required();
  scan_cmd->add_option("--delta", delta, "error threshold (0 = smallest ladder value)");
  scan_cmd->add_option("--eps-scales", eps_scales, "ladder length");
  scan_cmd->add_option("--queries", queries, "query subsample size");
  scan_cmd->add_option("--seed", scan_seed, "query sampling seed");
  scan_cmd->add_option("--out", scan_out, "output curve CSV")->required();
  scan_cmd->add_option("--fit", fit_out, "also write the log-log fit JSON");

  // dim
  auto* dim_cmd = app.add_subcommand("dim", "dimension estimate of a cloud");
  std::string dim_in, dim_out = "dim.json", method = "correlation";
  int samples = 150;
  dim_cmd->add_option("--in", dim_in, "input cloud CSV")->required();
  dim_cmd->add_option("--method", method, "correlation | box | local-quantiles");
  dim_cmd->add_option("--samples", samples, "centers for local-quantiles");
  dim_cmd->add_option("--out", dim_out, "output JSON")->required();

  // slice
  auto* slice_cmd = app.add_subcommand("slice", "extract a thin preimage slab");
  std::string slice_in, slice_out = "slice.csv", sidecar_out;
  std::size_t center = 0;
  double slab_delta = 0.0;
  slice_cmd->add_option("--in", slice_in, "input pairs CSV")->required();
  slice_cmd->add_option("--center", center, "index of the slab center point")->required();
  slice_cmd->add_option("--delta", slab_delta, "slab radius")->required();
  slice_cmd->add_option("--out", slice_out, "output member CSV")->required();
  slice_cmd->add_option("--sidecar", sidecar_out, "slab metadata JSON");

  // verify
  auto* verify = app.add_subcommand("verify", "run registered scenarios");
  std::string scenario_id = "all", verify_out = "results", config_file;
  bool quick = false;
  verify->add_option("--scenario", scenario_id, "scenario id or 'all'");
  verify->add_option("--out", verify_out, "results directory");
  verify->add_option("--config", config_file, "run a single scenario from a JSON config");
  verify->add_flag("--quick", quick, "smoke-test sizes (not the acceptance settings)");

  // report
  auto* report_cmd = app.add_subcommand("report", "summarize a results directory");
  std::string results_dir = "results";
  report_cmd->add_option("--results", results_dir, "results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (app.got_subcommand(sample)) return cmd_sample(system, n, burn_in, seed, out_file);

    if (app.got_subcommand(embed)) {
      PointCloud cloud = load_cloud_csv(embed_in);
      SystemSpec sys = parse_system(cloud.system);
      Observable h = resolve_observable(observable, cloud, sys, k, perturb_seed, perturb_radius);
      EmbeddedCloud ec = build_embedded(cloud, sys, h, k);
      save_embedded_csv(ec, embed_out);
      return 0;
    }

    if (app.got_subcommand(scan_cmd)) {
      EmbeddedCloud ec = load_embedded_csv(scan_in);
      auto ladder = make_ladder(ec.u_view(), eps_scales).r;
      SigmaScan scan = scan_sigmas(ec, ladder, queries, scan_seed);
      double d = delta > 0.0 ? delta : delta_ladder(ec).front();
      ExceedanceCurve curve = curve_from_scan(scan, d);
      std::ofstream os(scan_out);
      save_curve_csv(curve, os);
      if (!fit_out.empty()) {
        ScalingFit fit = scaling_exponent(curve, scan.n_queries());
        write_text_file(fit_out, scaling_to_json(fit).dump(2) + "\n");
      }
      return 0;
    }

    if (app.got_subcommand(dim_cmd)) {
      PointCloud cloud = load_cloud_csv(dim_in);
      nlohmann::json j;
      if (method == "correlation") j = dimension_to_json(correlation_dimension(cloud));
      else if (method == "box") j = dimension_to_json(box_counting_dimension(cloud));
      else if (method == "local-quantiles") {
        HausdorffProxies p = hausdorff_proxies(cloud, samples);
        j = {{"method", "local-quantiles"}, {"q05", p.lower}, {"q95", p.upper},
             {"samples", p.samples.size()}};
      } else {
        std::cerr << "unknown method: " << method << "\n";
        return kExitUsage;
      }
      write_text_file(dim_out, j.dump(2) + "\n");
      return 0;
    }

    if (app.got_subcommand(slice_cmd)) {
      EmbeddedCloud ec = load_embedded_csv(slice_in);
      if (center >= ec.size()) throw DataError("slab center index out of range");
      double y[3];
      for (int d = 0; d < ec.k; ++d) y[d] = ec.u[static_cast<std::size_t>(d)][center];
      SliceEstimate slice = geometric_slice(ec, y, slab_delta);
      std::ofstream os(slice_out);
      save_slice_csv(slice, os);
      if (!sidecar_out.empty())
        write_text_file(sidecar_out, slice_sidecar(slice).dump(2) + "\n");
      return 0;
    }

    if (app.got_subcommand(verify)) {
      std::vector<ScenarioConfig> configs;
      if (!config_file.empty()) {
        configs.push_back(config_from_json(nlohmann::json::parse(read_text_file(config_file))));
      } else if (scenario_id == "all") {
        configs = scenario_registry();
      } else {
        configs.push_back(registry_config(scenario_id));
      }
      bool all_pass = true;
      for (auto cfg : configs) {
        if (quick) cfg = quick_variant(cfg);
        ScenarioResult res = run_scenario(cfg, verify_out);
        all_pass = all_pass && res.pass;
        std::cout << cfg.id << ": " << (res.pass ? "pass" : "FAIL")
                  << (res.partial ? " (partial)" : "") << "\n";
      }
      std::cout << report(verify_out);
      return all_pass ? 0 : kExitScenarioFailed;
    }

    if (app.got_subcommand(report_cmd)) {
      std::cout << report(results_dir);
      return 0;
    }
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
