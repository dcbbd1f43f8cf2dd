#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "selval/cost.hpp"
#include "selval/dataset.hpp"

namespace selval {

inline constexpr int kDefaultEceBins = 10;
inline constexpr int kDefaultSampleSize = 20;
inline constexpr int kDefaultNumSamples = 1000;
inline constexpr int kDefaultConfidenceBins = 20;

struct EceBin {
    double lo = 0.0;
    double hi = 0.0;
    std::int64_t count = 0;
    double mass = 0.0;
    double mean_confidence = 0.0;
    double accuracy = 0.0;
};

struct EceReport {
    int num_bins = 0;
    std::vector<EceBin> bins;
    double ece = 0.0;
};

// Equal-width confidence bins over (0, 1]; confidence c lands in bin
// ceil(c * num_bins), clamped to the valid range.
EceReport ece(const LabeledDataset& data, int num_bins = kDefaultEceBins);

struct AbeceBin {
    double a = 0.0;                // accuracy level j / n
    std::int64_t count = 0;        // samples landing here
    double mass = 0.0;             // count / N
    double mean_confidence = 0.0;  // E[C | A = a]; meaningless when count == 0
    double residual = 0.0;         // mean_confidence - a
};

// Accuracy-binned calibration error. Each of N samples holds n distinct items
// drawn without replacement; samples are binned by their accuracy. Larger n
// pulls mass toward the overall accuracy, so reports at different n are not
// directly comparable. Pre-partitioned datasets (e.g. by an input feature)
// can be compared by running this per partition.
struct AbeceReport {
    int sample_size = 0;
    int num_samples = 0;
    std::uint64_t seed = 0;
    std::vector<AbeceBin> bins;  // exactly n + 1
    double abece_sum = 0.0;      // sum of |R| over occupied bins
    double abece_weighted = 0.0; // mass-weighted sum of |R|
};

struct SampleStats {
    int correct = 0;
    double mean_confidence = 0.0;
};

// Draws the N samples. Sample j uses stream_rng(seed, j); `threads` only
// changes wall time, never the result.
std::vector<SampleStats> draw_samples(const LabeledDataset& data, int n, int num_samples,
                                      std::uint64_t seed, int threads = 1);

AbeceReport abece(const LabeledDataset& data, int n = kDefaultSampleSize,
                  int num_samples = kDefaultNumSamples, std::uint64_t seed = 0, int threads = 1);

// Confidence bin of a sample mean, same ceil convention as ece().
int confidence_bin(double confidence, int num_bins);

struct JointDensity {
    int sample_size = 0;
    int num_samples = 0;
    std::uint64_t seed = 0;
    Eigen::VectorXd accuracy_levels;   // n + 1 entries j / n
    Eigen::VectorXd confidence_edges;  // conf_bins + 1 entries
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
    Eigen::MatrixXd mass;              // counts / N, (n + 1) x conf_bins

    // Marginals are taken over the integer counts, so the accuracy marginal
    // matches abece() masses bit for bit.
    Eigen::VectorXd accuracy_marginal() const
    {
        return counts.rowwise().sum().cast<double>() / static_cast<double>(num_samples);
    }
    Eigen::RowVectorXd confidence_marginal() const
    {
        return counts.colwise().sum().cast<double>() / static_cast<double>(num_samples);
    }
};

JointDensity joint_density(const LabeledDataset& data, int n = kDefaultSampleSize,
                           int num_samples = kDefaultNumSamples,
                           int conf_bins = kDefaultConfidenceBins, std::uint64_t seed = 0,
                           int threads = 1);

enum class ThresholdRule { theoretical, empirical };

ThresholdRule parse_threshold_rule(const std::string& text);

// Tune splits for the empirical rule, one per model.
struct GainTuning {
    const LabeledDataset& before;
    const LabeledDataset& after;
};

struct CalibrationGain {
    CostSpec spec;
    double value_before = 0.0;
    double value_after = 0.0;
    double gain = 0.0;
    bool argmax_equal = true;
    std::size_t argmax_differences = 0;
};

// Value difference between two models that share ids and labels. Under the
// empirical rule each model's threshold is tuned on its own tune split, or on
// its evaluation data when no tuning is given.
CalibrationGain calibration_gain(const LabeledDataset& before, const LabeledDataset& after,
                                 const CostSpec& spec, ThresholdRule rule,
                                 std::optional<GainTuning> tuning = std::nullopt);

} // namespace selval
