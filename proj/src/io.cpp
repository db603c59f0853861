#include "odflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "odflow/error.hpp"

namespace odflow::io {

using Json = nlohmann::ordered_json;

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  if (res.ec != std::errc{}) throw InvalidInput("cannot format number");
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

double number_field(std::string_view s, const std::string& source, std::size_t line,
                    const char* column) {
  auto v = parse_number(s);
  if (!v) throw ParseError(source, line, std::string("column ") + column + ": not a number: '" +
                                             std::string(s) + "'");
  if (!std::isfinite(*v))
    throw ParseError(source, line, std::string("column ") + column + ": non-finite value");
  return *v;
}

// Reads non-blank lines; the callback receives (fields, line number).
template <class Row>
void read_csv(std::istream& in, const std::string& source,
              const std::vector<std::string_view>& header, Row row) {
  std::string text;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, text)) {
    ++line_no;
    const auto line = trim(text);
    if (line.empty()) continue;
    auto fields = split(line);
    if (first) {
      first = false;
      if (!parse_number(fields.front())) {
        const bool ok = fields.size() >= header.size() &&
                        std::equal(header.begin(), header.end(), fields.begin());
        if (!ok) throw ParseError(source, line_no, "unexpected header '" + std::string(line) + "'");
        row(fields, line_no, true);
        continue;
      }
    }
    row(fields, line_no, false);
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return in;
}

}  // namespace

FlowDataset read_flows(std::istream& in, const std::string& source) {
  static const char* kCols[] = {"ox", "oy", "dx", "dy"};
  std::vector<Flow> flows;
  std::vector<Label> labels;
  std::optional<bool> labelled;
  read_csv(in, source, {"ox", "oy", "dx", "dy"},
           [&](const std::vector<std::string_view>& f, std::size_t line, bool is_header) {
             if (is_header) {
               if (f.size() == 5 && f[4] == "label") labelled = true;
               else if (f.size() == 4) labelled = false;
               else throw ParseError(source, line, "expected columns ox,oy,dx,dy[,label]");
               return;
             }
             if (!labelled) labelled = f.size() == 5;
             const std::size_t want = *labelled ? 5 : 4;
             if (f.size() != want)
               throw ParseError(source, line, "expected " + std::to_string(want) +
                                                  " fields, found " + std::to_string(f.size()));
             double v[4];
             for (int k = 0; k < 4; ++k) v[k] = number_field(f[k], source, line, kCols[k]);
             flows.push_back({{v[0], v[1]}, {v[2], v[3]}});
             if (*labelled) {
               auto l = parse_label(f[4]);
               if (!l) throw ParseError(source, line, "unknown label '" + std::string(f[4]) + "'");
               labels.push_back(*l);
             }
           });
  if (flows.empty()) throw InsufficientData(source + ": no flows");
  return FlowDataset(std::move(flows), std::move(labels));
}

FlowDataset read_flows_file(const std::string& path) {
  auto in = open_input(path);
  return read_flows(in, path);
}

void write_flows(std::ostream& out, const FlowDataset& dataset) {
  out << (dataset.has_labels() ? "ox,oy,dx,dy,label\n" : "ox,oy,dx,dy\n");
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Flow& f = dataset[i];
    out << format_double(f.origin.x) << ',' << format_double(f.origin.y) << ','
        << format_double(f.destination.x) << ',' << format_double(f.destination.y);
    if (dataset.has_labels()) out << ',' << to_string(dataset.label(i));
    out << '\n';
  }
}

RoadNetwork read_network(std::istream& in, const std::string& source) {
  static const char* kCols[] = {"x1", "y1", "x2", "y2"};
  std::vector<RoadSegment> segs;
  read_csv(in, source, {"x1", "y1", "x2", "y2", "class"},
           [&](const std::vector<std::string_view>& f, std::size_t line, bool is_header) {
             if (is_header) {
               if (f.size() != 5) throw ParseError(source, line, "expected columns x1,y1,x2,y2,class");
               return;
             }
             if (f.size() != 5)
               throw ParseError(source, line, "expected 5 fields, found " + std::to_string(f.size()));
             double v[4];
             for (int k = 0; k < 4; ++k) v[k] = number_field(f[k], source, line, kCols[k]);
             auto cls = parse_road_class(f[4]);
             if (!cls) throw ParseError(source, line, "unknown road class '" + std::string(f[4]) + "'");
             RoadSegment s{segs.size(), {v[0], v[1]}, {v[2], v[3]}, *cls};
             if (!(s.length() > 0.0)) throw ParseError(source, line, "zero-length road segment");
             segs.push_back(s);
           });
  if (segs.empty()) throw InsufficientData(source + ": no road segments");
  return RoadNetwork(std::move(segs));
}

RoadNetwork read_network_file(const std::string& path) {
  auto in = open_input(path);
  return read_network(in, path);
}

void write_network(std::ostream& out, const RoadNetwork& network) {
  out << "x1,y1,x2,y2,class\n";
  for (const auto& s : network.segments()) {
    out << format_double(s.a.x) << ',' << format_double(s.a.y) << ',' << format_double(s.b.x)
        << ',' << format_double(s.b.y) << ',' << to_string(s.road_class) << '\n';
  }
}

void write_l_curve(std::ostream& out, const LCurve& curve) {
  out << "r,K,L,Lprime\n";
  for (std::size_t k = 0; k < curve.r_grid.size(); ++k) {
    out << format_double(curve.r_grid[k]) << ',' << format_double(curve.k_values[k]) << ','
        << format_double(curve.l_values[k]) << ',' << format_double(curve.l_prime_values[k])
        << '\n';
  }
}

void write_envelope(std::ostream& out, const CsrEnvelope& envelope) {
  out << "r,lower,upper,mean,sd\n";
  for (std::size_t k = 0; k < envelope.r_grid.size(); ++k) {
    out << format_double(envelope.r_grid[k]) << ',' << format_double(envelope.lower[k]) << ','
        << format_double(envelope.upper[k]) << ',' << format_double(envelope.mean[k]) << ','
        << format_double(envelope.std_dev[k]) << '\n';
  }
}

void write_scales_json(std::ostream& out, const DetectedScales& scales, double lambda) {
  Json j;
  j["found"] = scales.found;
  j["maximal_scale"] = scales.found ? Json(scales.maximal_scale) : Json(nullptr);
  j["secondary_scales"] = scales.secondary_scales;
  j["argmax_l"] = scales.argmax_l;
  j["saturation_r"] = scales.found ? Json(scales.saturation_r) : Json(nullptr);
  j["ambiguous"] = scales.ambiguous;
  j["lambda"] = lambda;
  Json minima = Json::array();
  for (const auto& m : scales.l_prime_minima)
    minima.push_back({{"r", m.r}, {"l_prime", m.l_prime}, {"prominence", m.prominence}});
  j["l_prime_minima"] = minima;
  out << j.dump(2) << '\n';
}

void write_cluster_json(std::ostream& out, const KeyCluster& cluster) {
  Json j;
  j["scale"] = cluster.scale;
  j["t"] = cluster.core_flow_ids.size();
  j["core_flow_ids"] = cluster.core_flow_ids;
  j["local_l"] = cluster.local_l_values;
  j["member_ids"] = cluster.member_ids;
  j["naf"] = cluster.member_ids.size();
  j["empty_intersection"] = cluster.empty_intersection();
  out << j.dump(2) << '\n';
}

namespace {

Json coordinates(const PlanePoint& p) { return Json::array({p.x, p.y}); }

Json hull_feature(const std::vector<PlanePoint>& hull, const char* plane) {
  Json geom;
  bool degenerate = true;
  if (hull.size() >= 3) {
    Json ring = Json::array();
    for (const auto& p : hull) ring.push_back(coordinates(p));
    ring.push_back(coordinates(hull.front()));
    geom = {{"type", "Polygon"}, {"coordinates", Json::array({ring})}};
    degenerate = false;
  } else if (hull.size() == 2) {
    geom = {{"type", "LineString"},
            {"coordinates", Json::array({coordinates(hull[0]), coordinates(hull[1])})}};
  } else if (hull.size() == 1) {
    geom = {{"type", "Point"}, {"coordinates", coordinates(hull[0])}};
  } else {
    geom = nullptr;
  }
  return {{"type", "Feature"},
          {"properties", {{"kind", "hull"}, {"plane", plane}, {"degenerate", degenerate}}},
          {"geometry", geom}};
}

}  // namespace

void write_aaa_geojson(std::ostream& out, const AaaResult& result, const RoadNetwork& network) {
  Json features = Json::array();
  auto add_segments = [&](const std::vector<std::size_t>& ids, const char* plane) {
    for (auto id : ids) {
      const RoadSegment& s = network.segment(id);
      features.push_back(
          {{"type", "Feature"},
           {"properties",
            {{"kind", "segment"}, {"plane", plane}, {"class", to_string(s.road_class)}, {"id", id}}},
           {"geometry",
            {{"type", "LineString"},
             {"coordinates", Json::array({coordinates(s.a), coordinates(s.b)})}}}});
    }
  };
  add_segments(result.o_segment_ids, "O");
  add_segments(result.d_segment_ids, "D");
  if (!result.empty_cluster) {
    features.push_back(hull_feature(result.o_hull, "O"));
    features.push_back(hull_feature(result.d_hull, "D"));
  }
  Json j;
  j["type"] = "FeatureCollection";
  j["properties"] = {{"snap_tolerance", result.snap_tolerance},
                     {"empty_cluster", result.empty_cluster}};
  j["features"] = features;
  out << j.dump(2) << '\n';
}

void write_eval_json(std::ostream& out, const EvalReport& report) {
  Json j;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["naf"] = report.n_predicted;
  out << j.dump(2) << '\n';
}

void write_benchmark_csv(std::ostream& out, const BenchmarkResult& result) {
  out << "pattern,method,scale,precision,recall,f1,naf\n";
  for (const auto& row : result.rows) {
    out << row.pattern << ',' << to_string(row.method) << ',' << format_double(row.scale) << ','
        << format_double(row.precision) << ',' << format_double(row.recall) << ','
        << format_double(row.f1) << ',' << format_double(row.n_predicted) << '\n';
  }
}

void write_benchmark_json(std::ostream& out, const BenchmarkResult& result) {
  const auto& c = result.config;
  Json j;
  Json methods = Json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  j["config"] = {{"patterns", c.patterns},       {"seeds_per_pattern", c.seeds_per_pattern},
                 {"master_seed", c.master_seed}, {"methods", methods},
                 {"t_max", c.t_max},             {"grid_steps", c.grid_steps},
                 {"dbscan_min_pts", c.dbscan_min_pts}};
  Json avg = Json::object();
  for (const auto& row : result.rows) {
    if (row.pattern != "average") continue;
    avg[std::string(to_string(row.method))] = {{"scale", row.scale},
                                               {"precision", row.precision},
                                               {"recall", row.recall},
                                               {"f1", row.f1},
                                               {"naf", row.n_predicted},
                                               {"cells", row.cells}};
  }
  j["average"] = avg;
  Json cells = Json::array();
  for (const auto& cell : result.cells) {
    cells.push_back({{"pattern", cell.pattern},
                     {"seed_index", cell.seed_index},
                     {"seed", cell_seed(c.master_seed, cell.pattern, cell.seed_index)},
                     {"method", to_string(cell.method)},
                     {"scale", cell.report.detected_scale},
                     {"scale_found", cell.scale_found},
                     {"best_t", cell.best_t},
                     {"precision", cell.report.precision},
                     {"recall", cell.report.recall},
                     {"f1", cell.report.f1},
                     {"naf", cell.report.n_predicted}});
  }
  j["cells"] = cells;
  out << j.dump(2) << '\n';
}

std::vector<std::size_t> read_prediction_file(const std::string& path) {
  auto in = open_input(path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<std::size_t> ids;
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path, 1, e.what());
    }
    const Json& arr = j.is_object() ? j.at("member_ids") : j;
    for (const auto& v : arr) ids.push_back(v.get<std::size_t>());
    return ids;
  }
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    std::size_t v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
      throw ParseError(path, line_no, "not a flow id: '" + std::string(t) + "'");
    ids.push_back(v);
  }
  return ids;
}

}  // namespace odflow::io
