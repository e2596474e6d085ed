#pragma once

#include <string>

#include <json.hpp>

#include "graphlim/graphon.hpp"
#include "graphlim/large_deviations.hpp"
#include "graphlim/quotient_space.hpp"
#include "graphlim/regularity.hpp"
#include "graphlim/statphys.hpp"

namespace graphlim {

using nlohmann::json;

// Graph JSON: {"vertex_weights":[...], "edges":[[u,v,beta],...]} with
// 0-based indices; absent pairs mean beta = 0; symmetric closure is
// applied on load and duplicate (u,v) entries (in either order) are
// rejected.
WeightedGraph graph_from_json(const json& j);
json graph_to_json(const WeightedGraph& g);

// Graphon JSON: {"step_lengths":[...], "values":[[...]]} row-major.
StepGraphon graphon_from_json(const json& j);
json graphon_to_json(const StepGraphon& w);

// Model JSON: {"J":[[...]], "h":[...], "a":[...], "eps":...}; h optional.
CouplingModel model_from_json(const json& j);
json model_to_json(const CouplingModel& m);

Quotient quotient_from_json(const json& j);
json quotient_to_json(const Quotient& s);

QuotientSet quotient_set_from_json(const json& j);
json quotient_set_to_json(const QuotientSet& s);

json distance_bound_to_json(const DistanceBound& b);
json energy_result_to_json(const EnergyResult& r);
json rate_estimate_to_json(const RateEstimate& r);
json regularity_report_to_json(const RegularityReport& r);
json weak_regularity_to_json(const WeakRegularityResult& r);
json partition_to_json(const VertexPartition& p);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

// CSV with the versioned "# graphlim-report v1" header comment; all
// floating-point fields printed with 12 significant digits.
std::string format_double(double x);
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<std::string>& cells);
  void add_row_values(const std::vector<double>& values);
  std::string str() const;
  void save(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace graphlim
