#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selval/calibrate.hpp"
#include "selval/cost.hpp"
#include "selval/dataset.hpp"
#include "selval/selective.hpp"

namespace selval {

enum class CurveRule { theoretical, empirical_tune, empirical_test, fixed };

CurveRule parse_curve_rule(const std::string& text);
const char* to_string(CurveRule rule);

// Binary sweeps: k_fp pinned at 1 with k_fn = k, or k_fp = k_fn = k.
enum class AsymmetricMode { fixed_1, equal };

AsymmetricMode parse_asymmetric_mode(const std::string& text);
const char* to_string(AsymmetricMode mode);

struct AsymmetricConfig {
    AsymmetricMode mode = AsymmetricMode::fixed_1;
    int positive_class = 1;
};

struct CurveConfig {
    double k_min = 0.0;
    double k_max = 10.0;
    double k_step = 0.25;
    std::vector<CurveRule> rules{CurveRule::theoretical};
    std::optional<double> fixed_tau;
    bool calibrate_first = false;
    ThresholdMode threshold_mode = ThresholdMode::global;
    std::optional<AsymmetricConfig> asymmetric;

    std::vector<double> k_grid() const;
    CostSpec spec_for(double k) const;
    void validate(bool have_tune) const;
};

struct CurveMetadata {
    std::optional<double> temperature;  // set when calibrate_first
    std::string calibration_split;      // "tune" when calibrated
    bool used_tune = false;
    std::size_t averaged_over = 1;
};

struct CurvePoint {
    double k = 0.0;
    ThresholdPolicy policy;  // meaningless for averaged curves
    double rho = 0.0;
    double alpha = 0.0;
    double value = 0.0;
};

struct ValueCurve {
    std::string model;
    CurveRule rule = CurveRule::theoretical;
    std::vector<CurvePoint> points;
    CurveMetadata metadata;
};

// One curve per configured rule, evaluated on `test`. Empirical thresholds are
// re-tuned at every k. With calibrate_first a temperature is fit on `tune`
// and applied to both splits before thresholding.
std::vector<ValueCurve> run_curve(const std::optional<LabeledDataset>& tune,
                                  const LabeledDataset& test, const CurveConfig& config,
                                  const std::string& model = "model");

// Pointwise mean of values, rho and alpha over curves sharing rule and grid.
// Thresholds stay per pair and are not averaged.
ValueCurve average_curves(const std::vector<ValueCurve>& curves, const std::string& model);

struct ModelSplits {
    std::string name;
    std::optional<LabeledDataset> tune;
    LabeledDataset test;
};

struct CompareReport {
    CurveRule rule = CurveRule::theoretical;
    std::vector<std::string> models;  // sorted by name
    std::vector<double> ks;
    Eigen::VectorXd accuracy;         // per model
    Eigen::MatrixXd value;            // models x ks
    std::size_t best_by_accuracy = 0;
    std::vector<std::size_t> best_by_value;  // per k
    std::vector<bool> crossover;             // per k

    std::size_t crossover_count() const;
};

// Tabulates accuracy and value per k under the first configured rule. Ties go
// to the model whose name sorts first.
CompareReport run_compare(std::vector<ModelSplits> models, const CurveConfig& config);

} // namespace selval
