// odflow: command-line front end for flow L-function analysis.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "odflow/aaa.hpp"
#include "odflow/clustering.hpp"
#include "odflow/error.hpp"
#include "odflow/evalkit.hpp"
#include "odflow/io.hpp"
#include "odflow/lstat.hpp"
#include "odflow/simgen.hpp"

using namespace odflow;

namespace {

struct MetricOptions {
  std::string metric = "manhattan";
  std::string combinator = "max";
  double origin_weight = 0.5;

  void add_to(CLI::App* app) {
    app->add_option("--metric", metric, "Point metric")
        ->check(CLI::IsMember({"manhattan", "euclidean"}))
        ->capture_default_str();
    app->add_option("--combinator", combinator, "How the O and D distances combine")
        ->check(CLI::IsMember({"max", "additive"}))
        ->capture_default_str();
    app->add_option("--origin-weight", origin_weight,
                    "Origin weight of the additive combinator; the destination gets the rest")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  }

  DistanceSpec spec() const {
    const auto m = metric == "euclidean" ? PointMetric::euclidean : PointMetric::manhattan;
    if (combinator == "additive") return DistanceSpec::additive(m, origin_weight, 1.0 - origin_weight);
    return DistanceSpec{m, Combinator::maximum};
  }
};

struct GridOptions {
  std::size_t steps = 100;
  std::optional<double> r_min;
  std::optional<double> r_max;
  std::vector<double> domain;

  void add_to(CLI::App* app) {
    app->add_option("--steps", steps, "Number of radii in the r grid")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--r-min", r_min, "Smallest radius (default: domain L1 diameter / 200)");
    app->add_option("--r-max", r_max, "Largest radius (default: domain L1 diameter / 4)");
    app->add_option("--domain", domain,
                    "Domain rectangle min_x min_y max_x max_y for both planes "
                    "(default: bounding boxes of the flows)")
        ->expected(4);
  }

  FlowDataset apply_domain(const FlowDataset& data) const {
    if (domain.empty()) return data;
    const Bounds b{domain[0], domain[1], domain[2], domain[3]};
    std::vector<Flow> flows(data.flows().begin(), data.flows().end());
    std::vector<Label> labels(data.labels().begin(), data.labels().end());
    return FlowDataset(std::move(flows), std::move(labels), FlowDomain{b, b});
  }

  std::vector<double> grid(const FlowDomain& dom) const {
    auto g = default_r_grid(dom, steps);
    if (!r_min && !r_max) return g;
    const double lo = r_min.value_or(g.front());
    const double hi = r_max.value_or(g.back());
    if (!(lo > 0.0) || !(hi >= lo)) throw InvalidParameter("need 0 < r-min <= r-max");
    if (steps == 1) return {lo};
    std::vector<double> out(steps);
    for (std::size_t k = 0; k < steps; ++k)
      out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
    return out;
  }
};

// Writes through a buffer so a failed run leaves no partial file behind.
void emit(const std::string& path, const std::function<void(std::ostream&)>& write) {
  std::ostringstream buf;
  write(buf);
  if (path.empty() || path == "-") {
    std::cout << buf.str();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << buf.str();
  if (!out) throw InvalidInput("error writing '" + path + "'");
}

DetectedScales detect_for(const LCurve& curve, double prominence) {
  ScaleDetectionOptions opts;
  opts.smoothing_window = curve.smoothing_window;
  opts.prominence = prominence;
  return detect_scales(curve, opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aggregation analysis of origin-destination flows with the flow L-function"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "odflow 0.1.0");

  // simulate
  SimConfig sim;
  std::string sim_flows = "flows.csv", sim_network = "network.csv";
  auto* simulate = app.add_subcommand("simulate", "Generate a labelled grid-network benchmark dataset");
  simulate->add_option("--pattern", sim.pattern, "Grid layout 1..8")
      ->check(CLI::Range(1, kPatternCount))
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--n-aggregated", sim.n_aggregated, "Aggregated flows")->capture_default_str();
  simulate->add_option("--n-noise", sim.n_noise, "Noise flows")->capture_default_str();
  simulate->add_option("--n-background", sim.n_background, "Background flows")->capture_default_str();
  simulate->add_option("--scale", sim.scale, "Planting radius")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--flows-out", sim_flows, "Flow CSV to write")->capture_default_str();
  simulate->add_option("--network-out", sim_network, "Road network CSV to write")->capture_default_str();

  // lcurve
  std::string input, output;
  std::optional<double> lambda;
  std::size_t window = 3;
  MetricOptions metric;
  GridOptions grid;
  auto* lcurve = app.add_subcommand("lcurve", "K, L and L' over a radius grid (CSV r,K,L,Lprime)");
  lcurve->add_option("--input,-i", input, "Flow CSV")->required()->check(CLI::ExistingFile);
  lcurve->add_option("--output,-o", output, "Output CSV (default: stdout)");
  lcurve->add_option("--lambda", lambda, "Fixed intensity instead of the nearest-neighbour estimate")
      ->check(CLI::PositiveNumber);
  lcurve->add_option("--window", window, "Odd boxcar window smoothing L before differencing")
      ->capture_default_str();
  metric.add_to(lcurve);
  grid.add_to(lcurve);

  // scales
  double prominence = 0.05;
  auto* scales = app.add_subcommand("scales", "Detect aggregation scales from the L-curve (JSON)");
  scales->add_option("--input,-i", input, "Flow CSV")->required()->check(CLI::ExistingFile);
  scales->add_option("--output,-o", output, "Output JSON (default: stdout)");
  scales->add_option("--lambda", lambda, "Fixed intensity")->check(CLI::PositiveNumber);
  scales->add_option("--window", window, "Odd boxcar window")->capture_default_str();
  scales->add_option("--prominence", prominence, "Minimum L' dip, as a fraction of the L' range")
      ->capture_default_str();
  metric.add_to(scales);
  grid.add_to(scales);

  // cluster
  std::optional<double> scale;
  std::size_t top_t = 3;
  auto* cluster = app.add_subcommand("cluster", "Key cluster of the top-T core flows (JSON)");
  cluster->add_option("--input,-i", input, "Flow CSV")->required()->check(CLI::ExistingFile);
  cluster->add_option("--output,-o", output, "Output JSON (default: stdout)");
  cluster->add_option("--scale", scale, "Clustering radius (default: detected)")
      ->check(CLI::NonNegativeNumber);
  cluster->add_option("--top,-t", top_t, "Number of core flows T")->capture_default_str();
  cluster->add_option("--lambda", lambda, "Fixed intensity")->check(CLI::PositiveNumber);
  cluster->add_option("--window", window, "Odd boxcar window for scale detection")->capture_default_str();
  cluster->add_option("--prominence", prominence, "L' dip threshold for scale detection")
      ->capture_default_str();
  metric.add_to(cluster);
  grid.add_to(cluster);

  // aaa
  std::string network_path, cluster_path;
  std::optional<double> tolerance;
  auto* aaa = app.add_subcommand("aaa", "Road segments and hulls covered by a key cluster (GeoJSON)");
  aaa->add_option("--input,-i", input, "Flow CSV")->required()->check(CLI::ExistingFile);
  aaa->add_option("--network,-n", network_path, "Road network CSV")->required()->check(CLI::ExistingFile);
  aaa->add_option("--cluster,-c", cluster_path, "Cluster JSON from `cluster`")
      ->required()
      ->check(CLI::ExistingFile);
  aaa->add_option("--tolerance", tolerance, "Snap tolerance (default: 2% of the network diagonal)")
      ->check(CLI::NonNegativeNumber);
  aaa->add_option("--output,-o", output, "Output GeoJSON (default: stdout)");

  // evaluate
  std::string prediction_path;
  auto* evaluate = app.add_subcommand("evaluate", "Precision, recall and F1 of a prediction (JSON)");
  evaluate->add_option("--input,-i", input, "Labelled flow CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--prediction,-p", prediction_path,
                       "Cluster JSON or a file of flow ids, one per line")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--output,-o", output, "Output JSON (default: stdout)");

  // benchmark
  BenchmarkConfig bench;
  std::vector<std::string> methods{"mlf", "elf", "dbscan"};
  std::string bench_json;
  auto* benchmark = app.add_subcommand("benchmark", "Scores of every method over the grid layouts (CSV)");
  benchmark->add_option("--seeds", bench.seeds_per_pattern, "Datasets per pattern")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  benchmark->add_option("--seed", bench.master_seed, "Master seed")->capture_default_str();
  benchmark->add_option("--patterns", bench.patterns, "Layouts to run")
      ->check(CLI::Range(1, kPatternCount))
      ->capture_default_str();
  benchmark->add_option("--methods", methods, "Methods to run")
      ->check(CLI::IsMember({"mlf", "elf", "dbscan"}))
      ->capture_default_str();
  benchmark->add_option("--t-max", bench.t_max, "Largest T in the sweep")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  benchmark->add_option("--steps", bench.grid_steps, "Radii in the r grid")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  benchmark->add_option("--output,-o", output, "Output CSV (default: stdout)");
  benchmark->add_option("--json", bench_json, "Also write a JSON summary with every cell");

  // csr-envelope
  std::size_t csr_n = 400, sims = 99;
  double quantile = 0.95;
  std::uint64_t seed = 0;
  auto* envelope = app.add_subcommand("csr-envelope", "Pointwise L band under complete spatial randomness (CSV)");
  envelope->add_option("--n", csr_n, "Flows per simulation")->check(CLI::PositiveNumber)->capture_default_str();
  envelope->add_option("--sims", sims, "Number of simulations")->check(CLI::PositiveNumber)->capture_default_str();
  envelope->add_option("--quantile", quantile, "Central coverage of the band")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  envelope->add_option("--seed", seed, "Seed of the first simulation")->capture_default_str();
  envelope->add_option("--output,-o", output, "Output CSV (default: stdout)");
  metric.add_to(envelope);
  grid.add_to(envelope);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      const auto data = generate_dataset(sim);
      emit(sim_flows, [&](std::ostream& o) { io::write_flows(o, data.dataset); });
      emit(sim_network, [&](std::ostream& o) { io::write_network(o, data.network); });
      std::map<Label, std::size_t> counts;
      for (auto l : data.dataset.labels()) ++counts[l];
      std::cout << "flows " << data.dataset.size() << " (aggregated " << counts[Label::aggregated]
                << ", noise " << counts[Label::noise] << ", background "
                << counts[Label::background] << "), segments " << data.network.size() << '\n';
    } else if (lcurve->parsed() || scales->parsed() || cluster->parsed()) {
      const auto data = grid.apply_domain(io::read_flows_file(input));
      const auto spec = metric.spec();
      const DistanceMatrix distances(data, spec);
      const auto need_curve = !cluster->parsed() || !scale || !lambda;
      LCurve curve;
      if (need_curve) curve = compute_l_curve(distances, grid.grid(data.domain()), lambda, window);
      if (lcurve->parsed()) {
        emit(output, [&](std::ostream& o) { io::write_l_curve(o, curve); });
      } else if (scales->parsed()) {
        const auto found = detect_for(curve, prominence);
        emit(output, [&](std::ostream& o) { io::write_scales_json(o, found, curve.lambda_used); });
      } else {
        double r = 0.0;
        if (scale) {
          r = *scale;
        } else {
          const auto found = detect_for(curve, prominence);
          if (!found.found) throw InsufficientData("no aggregation scale detected; pass --scale");
          r = found.maximal_scale;
        }
        const double lam = lambda ? *lambda : curve.lambda_used;
        const auto key = extract_key_cluster(distances, r, top_t, lam);
        emit(output, [&](std::ostream& o) { io::write_cluster_json(o, key); });
      }
    } else if (aaa->parsed()) {
      const auto data = io::read_flows_file(input);
      const auto net = io::read_network_file(network_path);
      KeyCluster key;
      key.member_ids = io::read_prediction_file(cluster_path);
      for (auto id : key.member_ids) data.flow(id);
      const auto result = extract_aaa(key, data, net, tolerance.value_or(net.default_snap_tolerance()));
      emit(output, [&](std::ostream& o) { io::write_aaa_geojson(o, result, net); });
    } else if (evaluate->parsed()) {
      const auto data = io::read_flows_file(input);
      const auto report = score(io::read_prediction_file(prediction_path), data);
      emit(output, [&](std::ostream& o) { io::write_eval_json(o, report); });
    } else if (benchmark->parsed()) {
      bench.methods.clear();
      for (const auto& m : methods) bench.methods.push_back(*parse_method(m));
      const auto result = run_benchmark(bench);
      emit(output, [&](std::ostream& o) { io::write_benchmark_csv(o, result); });
      if (!bench_json.empty())
        emit(bench_json, [&](std::ostream& o) { io::write_benchmark_json(o, result); });
    } else if (envelope->parsed()) {
      FlowDomain dom = FlowDomain::unit();
      if (!grid.domain.empty()) {
        const Bounds b{grid.domain[0], grid.domain[1], grid.domain[2], grid.domain[3]};
        dom = {b, b};
      }
      const auto band = csr_envelope(csr_n, dom, grid.grid(dom), sims, quantile, metric.spec(), seed);
      emit(output, [&](std::ostream& o) { io::write_envelope(o, band); });
    }
  } catch (const odflow::Error& e) {
    std::cerr << "odflow: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "odflow: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
