#pragma once

#include <string>
#include <variant>

#include <Eigen/Core>

namespace selval {

// Threshold above 1 that rejects every prediction.
inline constexpr double kRejectAll = 1.0 + 1e-6;
inline constexpr double kMaxThreshold = 1.000001;

struct GlobalThreshold {
    double tau = 0.0;
};

// One cutoff per predicted class.
struct PerClassThreshold {
    Eigen::VectorXd taus;
};

using ThresholdPolicy = std::variant<GlobalThreshold, PerClassThreshold>;

enum class Decision { accept, reject };

/// Threshold that applies to an item predicted as `predicted`.
inline double threshold_for(const ThresholdPolicy& policy, int predicted)
{
    if (const auto* g = std::get_if<GlobalThreshold>(&policy)) {
        return g->tau;
    }
    return std::get<PerClassThreshold>(policy).taus(predicted);
}

/// Selector: keep the prediction iff its confidence reaches the threshold.
inline Decision apply_policy(const ThresholdPolicy& policy, int predicted, double confidence)
{
    return confidence >= threshold_for(policy, predicted) ? Decision::accept : Decision::reject;
}

// Throws ValidationError when a threshold is outside [0, kMaxThreshold] or a
// per-class policy does not have num_classes entries.
void validate_policy(const ThresholdPolicy& policy, int num_classes);

std::string describe(const ThresholdPolicy& policy);

} // namespace selval
