#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "odflow/aaa.hpp"
#include "odflow/clustering.hpp"
#include "odflow/error.hpp"
#include "odflow/evalkit.hpp"
#include "odflow/io.hpp"
#include "odflow/lstat.hpp"
#include "odflow/simgen.hpp"

namespace py = pybind11;
using namespace odflow;

namespace {

using FlowTuple = std::tuple<double, double, double, double>;

DistanceSpec make_spec(const std::string& metric, const std::string& combinator,
                       double origin_weight) {
  PointMetric m;
  if (metric == "manhattan") m = PointMetric::manhattan;
  else if (metric == "euclidean") m = PointMetric::euclidean;
  else throw InvalidParameter("unknown metric '" + metric + "'");
  if (combinator == "max") return DistanceSpec{m, Combinator::maximum};
  if (combinator == "additive") return DistanceSpec::additive(m, origin_weight, 1.0 - origin_weight);
  throw InvalidParameter("unknown combinator '" + combinator + "'");
}

FlowDataset make_dataset(const std::vector<FlowTuple>& flows,
                         const std::vector<std::string>& labels) {
  std::vector<Flow> fs;
  fs.reserve(flows.size());
  for (const auto& [ox, oy, dx, dy] : flows) fs.push_back({{ox, oy}, {dx, dy}});
  std::vector<Label> ls;
  for (const auto& l : labels) {
    auto parsed = parse_label(l);
    if (!parsed) throw InvalidInput("unknown label '" + l + "'");
    ls.push_back(*parsed);
  }
  return FlowDataset(std::move(fs), std::move(ls));
}

std::vector<FlowTuple> flow_tuples(const FlowDataset& d) {
  std::vector<FlowTuple> out;
  for (const auto& f : d.flows())
    out.emplace_back(f.origin.x, f.origin.y, f.destination.x, f.destination.y);
  return out;
}

std::vector<std::string> label_strings(const FlowDataset& d) {
  std::vector<std::string> out;
  for (auto l : d.labels()) out.emplace_back(to_string(l));
  return out;
}

py::dict curve_dict(const LCurve& c) {
  py::dict d;
  d["r"] = c.r_grid;
  d["K"] = c.k_values;
  d["L"] = c.l_values;
  d["Lprime"] = c.l_prime_values;
  d["lambda"] = c.lambda_used;
  return d;
}

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  d["naf"] = r.n_predicted;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Flow L-function aggregation analysis";

  static py::exception<Error> base(m, "OdflowError", PyExc_ValueError);
  static py::exception<ParseError> parse_error(m, "ParseError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      py::set_error(parse_error, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<DistanceSpec>(m, "DistanceSpec")
      .def(py::init(&make_spec), py::arg("metric") = "manhattan", py::arg("combinator") = "max",
           py::arg("origin_weight") = 0.5)
      .def_property_readonly("metric", [](const DistanceSpec& s) { return std::string(to_string(s.metric)); })
      .def_property_readonly("combinator",
                             [](const DistanceSpec& s) { return std::string(to_string(s.combinator)); })
      .def("__repr__", [](const DistanceSpec& s) {
        return "DistanceSpec(" + std::string(to_string(s.metric)) + ", " +
               std::string(to_string(s.combinator)) + ")";
      });

  py::class_<FlowDataset>(m, "FlowDataset")
      .def(py::init(&make_dataset), py::arg("flows"), py::arg("labels") = std::vector<std::string>{})
      .def("__len__", &FlowDataset::size)
      .def_property_readonly("flows", &flow_tuples)
      .def_property_readonly("labels", &label_strings)
      .def("scaled", &FlowDataset::scaled, py::arg("factor"))
      .def("to_csv", [](const FlowDataset& d) {
        std::ostringstream out;
        io::write_flows(out, d);
        return out.str();
      });

  m.def("read_flows", &io::read_flows_file, py::arg("path"));
  m.def("flow_distance",
        [](const FlowTuple& a, const FlowTuple& b, const DistanceSpec& spec) {
          auto [ax, ay, bx, by] = a;
          auto [cx, cy, dx, dy] = b;
          return flow_distance({{ax, ay}, {bx, by}}, {{cx, cy}, {dx, dy}}, spec);
        },
        py::arg("f"), py::arg("g"), py::arg("spec") = DistanceSpec{});
  m.def("estimate_intensity",
        [](const FlowDataset& d, const DistanceSpec& spec) { return estimate_intensity(d, spec).lambda_hat; },
        py::arg("dataset"), py::arg("spec") = DistanceSpec{});
  m.def("k_function", &k_function, py::arg("dataset"), py::arg("r"), py::arg("lam"),
        py::arg("spec") = DistanceSpec{});
  m.def("l_function", &l_function, py::arg("dataset"), py::arg("r"), py::arg("lam"),
        py::arg("spec") = DistanceSpec{});
  m.def("local_l_function", &local_l_function, py::arg("dataset"), py::arg("i"), py::arg("r"),
        py::arg("lam"), py::arg("spec") = DistanceSpec{});
  m.def("default_r_grid",
        [](const FlowDataset& d, std::size_t steps) { return default_r_grid(d.domain(), steps); },
        py::arg("dataset"), py::arg("steps") = 100);
  m.def("compute_l_curve",
        [](const FlowDataset& d, std::optional<std::vector<double>> grid, const DistanceSpec& spec,
           std::optional<double> lam, std::size_t window) {
          const auto g = grid ? *grid : default_r_grid(d.domain());
          return curve_dict(compute_l_curve(d, g, spec, lam, window));
        },
        py::arg("dataset"), py::arg("r_grid") = py::none(), py::arg("spec") = DistanceSpec{},
        py::arg("lam") = py::none(), py::arg("window") = 3);
  m.def("detect_scales",
        [](const FlowDataset& d, const DistanceSpec& spec, std::size_t steps, double prominence) {
          const auto curve = compute_l_curve(d, default_r_grid(d.domain(), steps), spec);
          ScaleDetectionOptions opts;
          opts.prominence = prominence;
          const auto s = detect_scales(curve, opts);
          py::dict out;
          out["found"] = s.found;
          out["maximal_scale"] = s.found ? py::object(py::float_(s.maximal_scale)) : py::object(py::none());
          out["secondary_scales"] = s.secondary_scales;
          out["argmax_l"] = s.argmax_l;
          out["saturation_r"] = s.saturation_r;
          out["ambiguous"] = s.ambiguous;
          out["lambda"] = curve.lambda_used;
          return out;
        },
        py::arg("dataset"), py::arg("spec") = DistanceSpec{}, py::arg("steps") = 100,
        py::arg("prominence") = 0.05);
  m.def("extract_key_cluster",
        [](const FlowDataset& d, double scale, std::size_t top_t, std::optional<double> lam,
           const DistanceSpec& spec) {
          const DistanceMatrix dm(d, spec);
          const double l = lam ? *lam : estimate_intensity(dm).lambda_hat;
          const auto c = extract_key_cluster(dm, scale, top_t, l);
          py::dict out;
          out["scale"] = c.scale;
          out["core_flow_ids"] = c.core_flow_ids;
          out["local_l"] = c.local_l_values;
          out["member_ids"] = c.member_ids;
          out["empty_intersection"] = c.empty_intersection();
          return out;
        },
        py::arg("dataset"), py::arg("scale"), py::arg("top_t"), py::arg("lam") = py::none(),
        py::arg("spec") = DistanceSpec{});
  m.def("flow_dbscan",
        [](const FlowDataset& d, double eps, std::size_t min_pts, const DistanceSpec& spec) {
          return flow_dbscan(d, DbscanConfig{eps, min_pts, spec});
        },
        py::arg("dataset"), py::arg("epsilon") = 0.1, py::arg("min_pts") = 10,
        py::arg("spec") = DistanceSpec{});
  m.def("simulate",
        [](int pattern, std::uint64_t seed, std::size_t n_aggregated, std::size_t n_noise,
           std::size_t n_background, double scale) {
          SimConfig c;
          c.pattern = pattern;
          c.seed = seed;
          c.n_aggregated = n_aggregated;
          c.n_noise = n_noise;
          c.n_background = n_background;
          c.scale = scale;
          auto data = generate_dataset(c);
          std::vector<std::tuple<double, double, double, double, std::string>> segs;
          for (const auto& s : data.network.segments())
            segs.emplace_back(s.a.x, s.a.y, s.b.x, s.b.y, std::string(to_string(s.road_class)));
          return py::make_tuple(data.dataset, segs);
        },
        py::arg("pattern"), py::arg("seed") = 0, py::arg("n_aggregated") = 300,
        py::arg("n_noise") = 100, py::arg("n_background") = 300, py::arg("scale") = 0.1);
  m.def("score",
        [](const std::vector<std::size_t>& predicted, const FlowDataset& d) {
          return report_dict(score(predicted, d));
        },
        py::arg("predicted"), py::arg("dataset"));
  m.def("run_benchmark",
        [](std::vector<int> patterns, std::size_t seeds, std::uint64_t master_seed,
           std::vector<std::string> methods) {
          BenchmarkConfig c;
          c.patterns = std::move(patterns);
          c.seeds_per_pattern = seeds;
          c.master_seed = master_seed;
          c.methods.clear();
          for (const auto& s : methods) {
            auto mth = parse_method(s);
            if (!mth) throw InvalidParameter("unknown method '" + s + "'");
            c.methods.push_back(*mth);
          }
          const auto res = run_benchmark(c);
          py::list rows;
          for (const auto& r : res.rows) {
            py::dict d;
            d["pattern"] = r.pattern;
            d["method"] = std::string(to_string(r.method));
            d["scale"] = r.scale;
            d["precision"] = r.precision;
            d["recall"] = r.recall;
            d["f1"] = r.f1;
            d["naf"] = r.n_predicted;
            rows.append(d);
          }
          return rows;
        },
        py::arg("patterns") = std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8}, py::arg("seeds") = 20,
        py::arg("master_seed") = 0,
        py::arg("methods") = std::vector<std::string>{"mlf", "elf", "dbscan"});
  m.def("sample_csr",
        [](std::size_t n, std::uint64_t seed) { return sample_csr(n, FlowDomain::unit(), seed); },
        py::arg("n"), py::arg("seed") = 0);
  m.def("csr_envelope",
        [](std::size_t n, std::vector<double> grid, std::size_t sims, double q,
           const DistanceSpec& spec, std::uint64_t seed) {
          const auto e = csr_envelope(n, FlowDomain::unit(), grid, sims, q, spec, seed);
          py::dict d;
          d["r"] = e.r_grid;
          d["lower"] = e.lower;
          d["upper"] = e.upper;
          d["mean"] = e.mean;
          d["sd"] = e.std_dev;
          return d;
        },
        py::arg("n"), py::arg("r_grid"), py::arg("sims") = 99, py::arg("quantile") = 0.95,
        py::arg("spec") = DistanceSpec{}, py::arg("seed") = 0);
}
