#include "selval/selective.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "overloaded.hpp"

namespace selval {

namespace {

using detail::overloaded;

struct Sweep {
    double tau = kRejectAll;
    double value = 0.0;
    std::size_t evaluated = 0;
};

// Lowers the threshold over `items` (sorted by descending confidence) from
// kRejectAll to 0, adding items to `base` as they become accepted. The
// best-valued threshold wins; later (smaller) thresholds win ties.
Sweep sweep_down(const LabeledDataset& data, const std::vector<Index>& items,
                 SelectiveOutcome base, const CostSpec& spec)
{
    Sweep best;
    best.value = value_of(base, spec);
    best.evaluated = 1;
    const auto& conf = data.confidence();
    std::size_t pos = 0;
    auto consider = [&](double tau) {
        const double v = value_of(base, spec);
        ++best.evaluated;
        if (v >= best.value) {
            best.value = v;
            best.tau = tau;
        }
    };
    while (pos < items.size()) {
        const double tau = conf(items[pos]);
        while (pos < items.size() && conf(items[pos]) == tau) {
            const Index i = items[pos];
            ++base.confusion(data.labels()(i), data.predicted()(i));
            --base.rejected;
            ++pos;
        }
        consider(tau);
    }
    if (items.empty() || conf(items.back()) > 0.0) {
        consider(0.0);
    }
    return best;
}

std::vector<Index> by_descending_confidence(const LabeledDataset& data, std::vector<Index> items)
{
    const auto& conf = data.confidence();
    std::stable_sort(items.begin(), items.end(),
                     [&](Index a, Index b) { return conf(a) > conf(b); });
    return items;
}

} // namespace

ThresholdMode parse_threshold_mode(const std::string& text)
{
    if (text == "global") {
        return ThresholdMode::global;
    }
    if (text == "per_class") {
        return ThresholdMode::per_class;
    }
    throw ValidationError("unknown threshold mode '" + text + "' (expected global|per_class)");
}

ThresholdPolicy theoretical_threshold(const CostSpec& spec)
{
    validate_cost(spec);
    return std::visit(
        overloaded{[](const UniformCost& u) -> ThresholdPolicy {
                       return GlobalThreshold{u.k / (u.k + 1.0)};
                   },
                   [](const BinaryAsymmetricCost& b) -> ThresholdPolicy {
                       PerClassThreshold p{Eigen::VectorXd(2)};
                       p.taus(b.positive_class) = b.k_fp / (b.k_fp + 1.0);
                       p.taus(1 - b.positive_class) = b.k_fn / (b.k_fn + 1.0);
                       return p;
                   },
                   [](const FullCost&) -> ThresholdPolicy {
                       throw UnsupportedSpecError(
                           "no closed-form threshold for a full cost matrix; use the empirical "
                           "threshold search");
                   }},
        spec);
}

ThresholdSearchResult empirical_threshold(const LabeledDataset& tune, const CostSpec& spec,
                                          ThresholdMode mode)
{
    if (tune.empty()) {
        throw ValidationError("empirical threshold search needs a non-empty tune set");
    }
    validate_cost(spec, tune.num_classes());
    const int k = tune.num_classes();

    std::vector<Index> all(static_cast<std::size_t>(tune.size()));
    std::iota(all.begin(), all.end(), Index{0});
    all = by_descending_confidence(tune, std::move(all));

    const auto global =
        sweep_down(tune, all, SelectiveOutcome::empty(tune.size(), k), spec);
    ThresholdSearchResult result;
    result.candidates_evaluated = global.evaluated;
    if (mode == ThresholdMode::global) {
        result.policy = GlobalThreshold{global.tau};
        result.tune_value = value_at(tune, spec, result.policy).value;
        return result;
    }

    std::vector<std::vector<Index>> by_class(static_cast<std::size_t>(k));
    for (Index i : all) {
        by_class[static_cast<std::size_t>(tune.predicted()(i))].push_back(i);
    }
    PerClassThreshold policy{Eigen::VectorXd::Constant(k, global.tau)};
    double current = global.value;
    // Each accepted move strictly raises the value or strictly lowers a
    // threshold at equal value, so the loop terminates; the cap is a backstop.
    const std::size_t max_rounds = 4 * static_cast<std::size_t>(tune.size() + 2) * k;
    for (std::size_t round = 0; round < max_rounds; ++round) {
        bool changed = false;
        for (int j = 0; j < k; ++j) {
            auto base = outcome_of(tune, policy);
            for (Index i : by_class[static_cast<std::size_t>(j)]) {
                if (tune.confidence()(i) >= policy.taus(j)) {
                    --base.confusion(tune.labels()(i), j);
                    ++base.rejected;
                }
            }
            const auto best = sweep_down(tune, by_class[static_cast<std::size_t>(j)], base, spec);
            result.candidates_evaluated += best.evaluated;
            if (best.value > current || (best.value == current && best.tau < policy.taus(j))) {
                changed = changed || best.tau != policy.taus(j);
                policy.taus(j) = best.tau;
                current = best.value;
            }
        }
        if (!changed) {
            break;
        }
    }
    result.policy = policy;
    result.tune_value = value_at(tune, spec, result.policy).value;
    return result;
}

} // namespace selval
