#pragma once

#include <iosfwd>
#include <string>

#include "odflow/aaa.hpp"
#include "odflow/clustering.hpp"
#include "odflow/evalkit.hpp"
#include "odflow/flow.hpp"
#include "odflow/lstat.hpp"

namespace odflow::io {

/// Shortest round-trip decimal, independent of the locale.
std::string format_double(double value);

/// Flow CSV: header `ox,oy,dx,dy` with an optional trailing `label` column.
/// `source` names the input in error messages.
FlowDataset read_flows(std::istream& in, const std::string& source = "<input>");
FlowDataset read_flows_file(const std::string& path);
void write_flows(std::ostream& out, const FlowDataset& dataset);

/// Road network CSV: header `x1,y1,x2,y2,class`; ids are row order from 0.
RoadNetwork read_network(std::istream& in, const std::string& source = "<input>");
RoadNetwork read_network_file(const std::string& path);
void write_network(std::ostream& out, const RoadNetwork& network);

/// `r,K,L,Lprime`.
void write_l_curve(std::ostream& out, const LCurve& curve);
/// `r,lower,upper,mean,sd`.
void write_envelope(std::ostream& out, const CsrEnvelope& envelope);

void write_scales_json(std::ostream& out, const DetectedScales& scales, double lambda);
void write_cluster_json(std::ostream& out, const KeyCluster& cluster);
/// FeatureCollection: covered segments as LineStrings (properties plane,
/// class, id) then the O and D hulls. A hull with fewer than three vertices
/// becomes a LineString or Point flagged `degenerate`.
void write_aaa_geojson(std::ostream& out, const AaaResult& result, const RoadNetwork& network);
void write_eval_json(std::ostream& out, const EvalReport& report);

/// `pattern,method,scale,precision,recall,f1,naf`.
void write_benchmark_csv(std::ostream& out, const BenchmarkResult& result);
void write_benchmark_json(std::ostream& out, const BenchmarkResult& result);

/// Member ids from a cluster JSON file or a plain list (one id per line).
std::vector<std::size_t> read_prediction_file(const std::string& path);

}  // namespace odflow::io
