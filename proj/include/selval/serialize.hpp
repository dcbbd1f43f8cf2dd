#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "selval/calib_metrics.hpp"
#include "selval/calibrate.hpp"
#include "selval/cost.hpp"
#include "selval/dataset.hpp"
#include "selval/harness.hpp"
#include "selval/policy.hpp"
#include "selval/selective.hpp"

namespace selval {

using json = nlohmann::json;

// {"kind":"uniform","k":4} | {"kind":"binary","k_fp":1,"k_fn":4,"positive_class":1}
// | {"kind":"full","v_r":0,"v_c":1,"v_w":[[0,-1],[-4,0]]}
json to_json(const CostSpec& spec);
CostSpec cost_from_json(const json& j);

// {"kind":"global","tau":0.8} | {"kind":"per_class","taus":[0.5,0.8]}
json to_json(const ThresholdPolicy& policy);
ThresholdPolicy policy_from_json(const json& j);

// {"temperature":1.83,"fit_nll":0.41,...}
json to_json(const TemperatureScaler& scaler);
TemperatureScaler scaler_from_json(const json& j);

// Fields mirror CurveConfig; all optional.
CurveConfig curve_config_from_json(const json& j);

json to_json(const ValuePoint& point);
json to_json(const ThresholdSearchResult& result);
json to_json(const SplitDiagnostics& diag);
json to_json(const EceReport& report);
json to_json(const AbeceReport& report);
json to_json(const JointDensity& density);
json to_json(const CalibrationGain& gain);
json to_json(const std::vector<ValueCurve>& curves);
json to_json(const CompareReport& report);

json read_json_file(const std::string& path);

// Six-decimal fixed formatting; NaN prints as an empty field.
std::string fixed6(double x);
// Shortest round-trip representation, for scalar outputs.
std::string shortest(double x);

// model,rule,k,tau,rho,alpha,value
void write_curves_csv(std::ostream& out, const std::vector<ValueCurve>& curves);
void write_curves_md(std::ostream& out, const std::vector<ValueCurve>& curves);

// a,mass,mean_conf,residual
void write_abece_csv(std::ostream& out, const AbeceReport& report);
void write_abece_md(std::ostream& out, const AbeceReport& report);

// a,conf_lo,conf_hi,mass
void write_density_csv(std::ostream& out, const JointDensity& density);
void write_density_md(std::ostream& out, const JointDensity& density);

// lo,hi,mass,mean_conf,accuracy
void write_ece_csv(std::ostream& out, const EceReport& report);
void write_ece_md(std::ostream& out, const EceReport& report);

// model,accuracy,k,value,best_by_value,crossover
void write_compare_csv(std::ostream& out, const CompareReport& report);
// Rows are models; columns are accuracy and value at k in {1, 2, 4, 8, 10}.
void write_compare_md(std::ostream& out, const CompareReport& report);

} // namespace selval
