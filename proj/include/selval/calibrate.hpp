#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "selval/dataset.hpp"

namespace selval {

inline constexpr double kMinTemperature = 0.01;
inline constexpr double kMaxTemperature = 100.0;

enum class FitStatus {
    ok,
    flat,           // NLL does not depend on T (e.g. uniform scores); T = 1
    at_lower_bound, // minimum pinned at kMinTemperature
    at_upper_bound, // minimum pinned at kMaxTemperature
};

const char* to_string(FitStatus status);

struct TemperatureScaler {
    double temperature = 1.0;
    double fit_nll = 0.0;
    std::size_t fit_iterations = 0;
    FitStatus status = FitStatus::ok;
};

/// softmax(log p / T) for each row, with p floored at kProbabilityFloor.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
temper(const Eigen::MatrixBase<Derived>& probs, typename Derived::Scalar temperature)
{
    return softmax_rows(safe_log(probs) / temperature);
}

// Mean negative log-likelihood of the true labels after tempering.
double tempered_nll(const LabeledDataset& data, double temperature);

// Minimizes tempered_nll over T in [0.01, 100] by golden-section search on
// log T (tolerance 1e-4), then compares the bracket ends and T = 1 against
// the interior optimum.
TemperatureScaler fit_temperature(const LabeledDataset& tune);

// Argmax-preserving: predicted labels are kept, confidences recomputed.
LabeledDataset apply_temperature(const TemperatureScaler& scaler, const LabeledDataset& data);

} // namespace selval
