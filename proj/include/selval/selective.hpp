#pragma once

#include <cstddef>
#include <string>

#include "selval/cost.hpp"
#include "selval/dataset.hpp"
#include "selval/policy.hpp"

namespace selval {

enum class ThresholdMode { global, per_class };

ThresholdMode parse_threshold_mode(const std::string& text);

struct ThresholdSearchResult {
    ThresholdPolicy policy;
    double tune_value = 0.0;
    std::size_t candidates_evaluated = 0;
};

// Break-even confidence under perfect calibration: k / (k + 1). For the
// binary asymmetric spec each predicted class gets the cutoff of the error
// that a wrong prediction of that class would cause. Throws
// UnsupportedSpecError for FullCost.
ThresholdPolicy theoretical_threshold(const CostSpec& spec);

// Threshold that maximizes value on `tune`. Candidates are 0, every observed
// confidence and kRejectAll; equal values resolve to the smaller threshold.
// Per-class mode runs coordinate ascent from the global optimum, sweeping
// classes in index order until no single class improves.
ThresholdSearchResult empirical_threshold(const LabeledDataset& tune, const CostSpec& spec,
                                          ThresholdMode mode = ThresholdMode::global);

inline Decision apply_policy(const ThresholdPolicy& policy, const PredictionRecord& record)
{
    return apply_policy(policy, record.predicted_label, record.confidence);
}

} // namespace selval
