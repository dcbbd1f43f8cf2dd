#pragma once

// Test-only builders and oracles. The oracles here never call into the
// value/threshold code paths they check.

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "selval/cost.hpp"
#include "selval/dataset.hpp"

namespace selval::testing {

struct Item {
    int predicted = 0;
    double confidence = 1.0;
    int label = 0;
};

// Top score `confidence` on `predicted`, the rest split evenly.
inline LabeledDataset make_dataset(const std::vector<Item>& items, int num_classes,
                                   const std::string& name = "t")
{
    const auto n = static_cast<Index>(items.size());
    Eigen::MatrixXd probs(n, num_classes);
    Eigen::VectorXi labels(n);
    std::vector<std::string> ids;
    for (Index i = 0; i < n; ++i) {
        const auto& it = items[static_cast<std::size_t>(i)];
        const double rest = num_classes > 1 ? (1.0 - it.confidence) / (num_classes - 1) : 0.0;
        probs.row(i).setConstant(rest);
        probs(i, it.predicted) = it.confidence;
        labels(i) = it.label;
        ids.push_back(name + std::to_string(i));
    }
    return LabeledDataset::from_probabilities(name, std::move(ids), std::move(probs),
                                              std::move(labels));
}

// `count` items at one confidence, the first `correct` of them right.
inline void add_block(std::vector<Item>& items, int count, double confidence, int correct,
                      int num_classes, int predicted = 0)
{
    for (int i = 0; i < count; ++i) {
        const int label = i < correct ? predicted : (predicted + 1) % num_classes;
        items.push_back({predicted, confidence, label});
    }
}

// Random dataset whose confidences lie on the 1/1000 grid inside
// [ceil(1000/K)/1000, 0.999].
inline LabeledDataset random_grid_dataset(std::uint64_t seed, int max_items, int num_classes)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> size_dist(1, max_items);
    const int lo = (1000 + num_classes - 1) / num_classes + 1;
    std::uniform_int_distribution<int> conf_dist(lo, 999);
    std::uniform_int_distribution<int> cls(0, num_classes - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = size_dist(rng);
    std::vector<Item> items;
    for (int i = 0; i < n; ++i) {
        const double c = conf_dist(rng) / 1000.0;
        const int pred = cls(rng);
        int label = pred;
        if (unit(rng) > c) {
            label = (pred + 1 + cls(rng) % (num_classes - 1)) % num_classes;
        }
        items.push_back({pred, c, label});
    }
    return make_dataset(items, num_classes, "r" + std::to_string(seed) + "_");
}

// Payoff of a single item, straight from the definitions.
inline double item_payoff(const CostSpec& spec, int truth, int predicted, bool accepted)
{
    if (const auto* u = std::get_if<UniformCost>(&spec)) {
        if (!accepted) {
            return 0.0;
        }
        return truth == predicted ? 1.0 : -u->k;
    }
    if (const auto* b = std::get_if<BinaryAsymmetricCost>(&spec)) {
        if (!accepted) {
            return 0.0;
        }
        if (truth == predicted) {
            return 1.0;
        }
        return predicted == b->positive_class ? -b->k_fp : -b->k_fn;
    }
    const auto& f = std::get<FullCost>(spec);
    if (!accepted) {
        return f.v_r;
    }
    return truth == predicted ? f.v_c : f.v_w(truth, predicted);
}

// Mean per-item payoff of an outcome, expanding the confusion counts into
// individual items.
inline double mean_payoff(const SelectiveOutcome& outcome, const CostSpec& spec)
{
    double total = 0.0;
    for (std::int64_t r = 0; r < outcome.rejected; ++r) {
        total += item_payoff(spec, 0, 0, false);
    }
    for (Index t = 0; t < outcome.confusion.rows(); ++t) {
        for (Index p = 0; p < outcome.confusion.cols(); ++p) {
            for (std::int64_t c = 0; c < outcome.confusion(t, p); ++c) {
                total += item_payoff(spec, static_cast<int>(t), static_cast<int>(p), true);
            }
        }
    }
    return total / static_cast<double>(outcome.total);
}

// Mean per-item payoff of a dataset under a global threshold.
inline double mean_payoff(const LabeledDataset& data, const CostSpec& spec, double tau)
{
    double total = 0.0;
    for (Index i = 0; i < data.size(); ++i) {
        const bool accepted = data.confidence()(i) >= tau;
        total += item_payoff(spec, data.labels()(i), data.predicted()(i), accepted);
    }
    return total / static_cast<double>(data.size());
}

// Brute-force best global threshold on the 1001-point grid i / 1000.
inline double grid_scan_best(const LabeledDataset& data, const CostSpec& spec)
{
    double best = -1e300;
    for (int i = 0; i <= 1000; ++i) {
        best = std::max(best, mean_payoff(data, spec, i / 1000.0));
    }
    return best;
}

inline SelectiveOutcome random_outcome(std::mt19937_64& rng, int num_classes)
{
    std::uniform_int_distribution<int> count(0, 40);
    auto out = SelectiveOutcome::empty(0, num_classes);
    out.rejected = count(rng);
    for (int t = 0; t < num_classes; ++t) {
        for (int p = 0; p < num_classes; ++p) {
            out.confusion(t, p) = count(rng);
        }
    }
    out.total = out.rejected + out.confusion.sum();
    if (out.total == 0) {
        out.total = out.rejected = 1;
    }
    return out;
}

} // namespace selval::testing
