#include "selval/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "selval/calibrate.hpp"
#include "selval/rng.hpp"

namespace selval {

namespace {

std::int64_t round_half_up(double x)
{
    return static_cast<std::int64_t>(std::floor(x + 0.5));
}

std::string item_id(const std::string& name, std::int64_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "-%06lld", static_cast<long long>(i));
    return name + buf;
}

void validate(const ImpulseSpec& spec)
{
    if (spec.components.empty()) {
        throw ValidationError("impulse spec needs at least one component");
    }
    if (spec.num_classes < 2) {
        throw ValidationError("impulse spec needs at least 2 classes");
    }
    if (spec.items < static_cast<int>(spec.components.size())) {
        throw ValidationError("impulse spec has fewer items than components");
    }
    const double uniform = 1.0 / spec.num_classes;
    double total_weight = 0.0;
    for (const auto& c : spec.components) {
        if (!std::isfinite(c.weight) || c.weight < 0.0) {
            throw ValidationError("component weight must be >= 0");
        }
        if (!(c.confidence <= 1.0) || c.confidence < uniform - 1e-12) {
            throw ValidationError("component confidence " + std::to_string(c.confidence)
                                  + " outside [1/K, 1] for K=" + std::to_string(spec.num_classes));
        }
        if (!(c.accuracy >= 0.0 && c.accuracy <= 1.0)) {
            throw ValidationError("component accuracy must be in [0, 1]");
        }
        total_weight += c.weight;
    }
    if (std::abs(total_weight - 1.0) > 1e-9) {
        throw ValidationError("component weights sum to " + std::to_string(total_weight)
                              + ", not 1");
    }
}

} // namespace

ImpulseSpec impulse_preset(const std::string& model, int items, std::uint64_t seed,
                           int num_classes)
{
    ImpulseSpec spec;
    spec.items = items;
    spec.seed = seed;
    spec.num_classes = num_classes;
    if (model == "m1") {
        spec.components = {{1.0, 0.6, 0.6}};
    } else if (model == "m2") {
        spec.components = {{0.5, 0.9, 0.9}, {0.5, 0.1, 0.1}};
    } else if (model == "m3") {
        spec.components = {{0.5, 0.9, 0.9}, {0.5, 0.3, 0.3}};
    } else {
        throw ValidationError("unknown impulse preset '" + model + "' (expected m1|m2|m3)");
    }
    return spec;
}

LabeledDataset generate_impulse(const ImpulseSpec& spec, const std::string& name)
{
    validate(spec);
    const int k = spec.num_classes;
    const auto n_comp = spec.components.size();
    std::vector<std::int64_t> counts(n_comp);
    std::int64_t assigned = 0;
    for (std::size_t c = 0; c + 1 < n_comp; ++c) {
        counts[c] = round_half_up(spec.components[c].weight * spec.items);
        assigned += counts[c];
    }
    counts.back() = spec.items - assigned;
    if (counts.back() < 0) {
        throw ValidationError("component counts exceed the item total");
    }

    Eigen::MatrixXd probs(spec.items, k);
    Eigen::VectorXi labels(spec.items);
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(spec.items));

    std::int64_t row = 0;
    for (std::size_t c = 0; c < n_comp; ++c) {
        const auto& comp = spec.components[c];
        const std::int64_t quota = round_half_up(comp.accuracy * static_cast<double>(counts[c]));
        // A top score of exactly 1/K is a uniform row; its argmax is class 0.
        const bool uniform = std::abs(comp.confidence * k - 1.0) <= 1e-9;
        const double rest = (1.0 - comp.confidence) / (k - 1);
        for (std::int64_t pos = 0; pos < counts[c]; ++pos, ++row) {
            auto rng = stream_rng(spec.seed, static_cast<std::uint64_t>(row));
            std::uniform_int_distribution<int> pick_class(0, k - 1);
            std::uniform_int_distribution<int> pick_offset(1, k - 1);
            int predicted = pick_class(rng);
            const int offset = pick_offset(rng);
            if (uniform) {
                predicted = 0;
                probs.row(row).setConstant(1.0 / k);
            } else {
                probs.row(row).setConstant(rest);
                probs(row, predicted) = comp.confidence;
            }
            labels(row) = pos < quota ? predicted : (predicted + offset) % k;
            ids.push_back(item_id(name, row));
        }
    }
    return LabeledDataset::from_probabilities(name, std::move(ids), std::move(probs),
                                              std::move(labels));
}

LabeledDataset generate_calibrated(int items, int num_classes, double concentration,
                                   std::uint64_t seed, const std::string& name)
{
    if (items < 1) {
        throw ValidationError("generate_calibrated needs at least one item");
    }
    if (num_classes < 2) {
        throw ValidationError("generate_calibrated needs at least 2 classes");
    }
    if (!(concentration > 0.0) || !std::isfinite(concentration)) {
        throw ValidationError("concentration must be finite and > 0");
    }
    std::mt19937_64 rng(splitmix64(seed));
    std::gamma_distribution<double> gamma(concentration, 1.0);
    Eigen::MatrixXd probs(items, num_classes);
    Eigen::VectorXi labels(items);
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(items));
    std::vector<double> weights(static_cast<std::size_t>(num_classes));
    for (int i = 0; i < items; ++i) {
        double sum = 0.0;
        do {
            for (int j = 0; j < num_classes; ++j) {
                probs(i, j) = gamma(rng);
            }
            sum = probs.row(i).sum();
        } while (!(sum > 0.0) || !std::isfinite(sum));
        probs.row(i) /= sum;
        for (int j = 0; j < num_classes; ++j) {
            weights[static_cast<std::size_t>(j)] = probs(i, j);
        }
        std::discrete_distribution<int> draw(weights.begin(), weights.end());
        labels(i) = draw(rng);
        ids.push_back(item_id(name, i));
    }
    return LabeledDataset::from_probabilities(name, std::move(ids), std::move(probs),
                                              std::move(labels));
}

LabeledDataset distort(const LabeledDataset& data, double temperature)
{
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw ValidationError("distortion temperature must be finite and > 0");
    }
    return data.with_rescored(temper(data.probabilities(), temperature));
}

} // namespace selval
