#pragma once

#include <cstdint>
#include <variant>

#include <Eigen/Core>

#include "selval/dataset.hpp"
#include "selval/policy.hpp"

namespace selval {

// Every error costs k units of a correct prediction; rejection is worth 0.
struct UniformCost {
    double k = 0.0;
};

// Binary task with separate costs for false positives and false negatives,
// relative to `positive_class`.
struct BinaryAsymmetricCost {
    double k_fp = 0.0;
    double k_fn = 0.0;
    int positive_class = 1;
};

// General form: value of a rejection, of a correct prediction, and one entry
// per (true, predicted) error cell. The diagonal of v_w must be zero.
struct FullCost {
    double v_r = 0.0;
    double v_c = 1.0;
    Eigen::MatrixXd v_w;
};

using CostSpec = std::variant<UniformCost, BinaryAsymmetricCost, FullCost>;

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Tally of a selective classifier over a dataset. Confusion counts only the
// accepted items: rows are true classes, columns predicted classes.
struct SelectiveOutcome {
    std::int64_t total = 0;
    std::int64_t rejected = 0;
    CountMatrix confusion;

    std::int64_t accepted() const { return total - rejected; }
    bool rejected_all() const { return accepted() == 0; }
    double rho() const;
    // Accuracy among accepted items; 0 when everything is rejected.
    double alpha() const;
    int num_classes() const { return static_cast<int>(confusion.rows()); }

    static SelectiveOutcome empty(std::int64_t total, int num_classes);
};

struct ValuePoint {
    CostSpec spec;
    ThresholdPolicy policy;
    double rho = 0.0;
    double alpha = 0.0;
    double value = 0.0;
};

// Checks parameter ranges. With num_classes > 0 also checks compatibility.
void validate_cost(const CostSpec& spec, int num_classes = 0);

// Equivalent FullCost of any spec for a K-class problem.
FullCost to_full(const CostSpec& spec, int num_classes);

double value_of(const SelectiveOutcome& outcome, const CostSpec& spec);

SelectiveOutcome outcome_of(const LabeledDataset& data, const ThresholdPolicy& policy);

ValuePoint value_at(const LabeledDataset& data, const CostSpec& spec,
                    const ThresholdPolicy& policy);

} // namespace selval
