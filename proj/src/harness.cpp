#include "selval/harness.hpp"

#include <algorithm>
#include <cmath>

namespace selval {

CurveRule parse_curve_rule(const std::string& text)
{
    if (text == "theoretical") {
        return CurveRule::theoretical;
    }
    if (text == "empirical_tune") {
        return CurveRule::empirical_tune;
    }
    if (text == "empirical_test") {
        return CurveRule::empirical_test;
    }
    if (text == "fixed") {
        return CurveRule::fixed;
    }
    throw ValidationError("unknown rule '" + text
                          + "' (expected theoretical|empirical_tune|empirical_test|fixed)");
}

const char* to_string(CurveRule rule)
{
    switch (rule) {
    case CurveRule::theoretical:
        return "theoretical";
    case CurveRule::empirical_tune:
        return "empirical_tune";
    case CurveRule::empirical_test:
        return "empirical_test";
    case CurveRule::fixed:
        return "fixed";
    }
    return "unknown";
}

AsymmetricMode parse_asymmetric_mode(const std::string& text)
{
    if (text == "fixed_1") {
        return AsymmetricMode::fixed_1;
    }
    if (text == "equal") {
        return AsymmetricMode::equal;
    }
    throw ValidationError("unknown asymmetric mode '" + text + "' (expected fixed_1|equal)");
}

const char* to_string(AsymmetricMode mode)
{
    return mode == AsymmetricMode::equal ? "equal" : "fixed_1";
}

std::vector<double> CurveConfig::k_grid() const
{
    const auto steps = static_cast<std::int64_t>(std::floor((k_max - k_min) / k_step + 1e-9));
    std::vector<double> ks;
    ks.reserve(static_cast<std::size_t>(steps) + 1);
    for (std::int64_t i = 0; i <= steps; ++i) {
        ks.push_back(k_min + static_cast<double>(i) * k_step);
    }
    return ks;
}

CostSpec CurveConfig::spec_for(double k) const
{
    if (!asymmetric) {
        return UniformCost{k};
    }
    const double k_fp = asymmetric->mode == AsymmetricMode::fixed_1 ? 1.0 : k;
    return BinaryAsymmetricCost{k_fp, k, asymmetric->positive_class};
}

void CurveConfig::validate(bool have_tune) const
{
    if (!std::isfinite(k_min) || !std::isfinite(k_max) || k_min < 0.0 || k_min > k_max) {
        throw ValidationError("k grid needs 0 <= k_min <= k_max");
    }
    if (!(k_step > 0.0) || !std::isfinite(k_step)) {
        throw ValidationError("k_step must be > 0");
    }
    if (rules.empty()) {
        throw ValidationError("at least one rule is required");
    }
    for (auto rule : rules) {
        if (rule == CurveRule::empirical_tune && !have_tune) {
            throw ValidationError("rule empirical_tune requires a tune dataset");
        }
        if (rule == CurveRule::fixed && !fixed_tau) {
            throw ValidationError("rule fixed requires a threshold (--tau)");
        }
    }
    if (calibrate_first && !have_tune) {
        throw ValidationError("calibrate_first requires a tune dataset");
    }
    if (fixed_tau) {
        validate_policy(GlobalThreshold{*fixed_tau}, 1);
    }
}

std::vector<ValueCurve> run_curve(const std::optional<LabeledDataset>& tune,
                                  const LabeledDataset& test, const CurveConfig& config,
                                  const std::string& model)
{
    config.validate(tune.has_value());
    if (tune && tune->num_classes() != test.num_classes()) {
        throw ValidationError("tune and test datasets have different class counts");
    }
    CurveMetadata meta;
    meta.used_tune = tune.has_value();
    std::optional<LabeledDataset> tune_used = tune;
    LabeledDataset test_used = test;
    if (config.calibrate_first) {
        const auto scaler = fit_temperature(*tune);
        tune_used = apply_temperature(scaler, *tune);
        test_used = apply_temperature(scaler, test);
        meta.temperature = scaler.temperature;
        meta.calibration_split = "tune";
    }

    const auto ks = config.k_grid();
    std::vector<ValueCurve> curves;
    for (auto rule : config.rules) {
        ValueCurve curve{model, rule, {}, meta};
        curve.points.reserve(ks.size());
        for (double k : ks) {
            const auto spec = config.spec_for(k);
            ThresholdPolicy policy;
            switch (rule) {
            case CurveRule::theoretical:
                policy = theoretical_threshold(spec);
                break;
            case CurveRule::empirical_tune:
                policy = empirical_threshold(*tune_used, spec, config.threshold_mode).policy;
                break;
            case CurveRule::empirical_test:
                policy = empirical_threshold(test_used, spec, config.threshold_mode).policy;
                break;
            case CurveRule::fixed:
                policy = GlobalThreshold{*config.fixed_tau};
                break;
            }
            const auto vp = value_at(test_used, spec, policy);
            curve.points.push_back({k, policy, vp.rho, vp.alpha, vp.value});
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

ValueCurve average_curves(const std::vector<ValueCurve>& curves, const std::string& model)
{
    if (curves.empty()) {
        throw ValidationError("nothing to average");
    }
    ValueCurve out{model, curves.front().rule, curves.front().points, {}};
    out.metadata.averaged_over = curves.size();
    for (std::size_t c = 1; c < curves.size(); ++c) {
        const auto& other = curves[c];
        if (other.rule != out.rule || other.points.size() != out.points.size()) {
            throw ValidationError("curves to average must share rule and k grid");
        }
        for (std::size_t p = 0; p < out.points.size(); ++p) {
            if (other.points[p].k != out.points[p].k) {
                throw ValidationError("curves to average must share the k grid");
            }
            out.points[p].rho += other.points[p].rho;
            out.points[p].alpha += other.points[p].alpha;
            out.points[p].value += other.points[p].value;
        }
    }
    const auto n = static_cast<double>(curves.size());
    for (auto& p : out.points) {
        p.rho /= n;
        p.alpha /= n;
        p.value /= n;
        p.policy = GlobalThreshold{std::nan("")};
    }
    return out;
}

std::size_t CompareReport::crossover_count() const
{
    return static_cast<std::size_t>(std::count(crossover.begin(), crossover.end(), true));
}

CompareReport run_compare(std::vector<ModelSplits> models, const CurveConfig& config)
{
    if (models.size() < 2) {
        throw ValidationError("compare needs at least two models");
    }
    std::sort(models.begin(), models.end(),
              [](const ModelSplits& a, const ModelSplits& b) { return a.name < b.name; });
    for (std::size_t m = 1; m < models.size(); ++m) {
        if (models[m].name == models[m - 1].name) {
            throw ValidationError("duplicate model name '" + models[m].name + "'");
        }
        if (models[m].test.num_classes() != models[0].test.num_classes()) {
            throw ValidationError("models have different class counts");
        }
    }
    CurveConfig single = config;
    single.rules = {config.rules.empty() ? CurveRule::theoretical : config.rules.front()};

    CompareReport report;
    report.rule = single.rules.front();
    report.ks = single.k_grid();
    const auto n_models = static_cast<Index>(models.size());
    const auto n_ks = static_cast<Index>(report.ks.size());
    report.accuracy.resize(n_models);
    report.value.resize(n_models, n_ks);
    for (Index m = 0; m < n_models; ++m) {
        const auto& model = models[static_cast<std::size_t>(m)];
        report.models.push_back(model.name);
        report.accuracy(m) = model.test.accuracy();
        const auto curve = run_curve(model.tune, model.test, single, model.name).front();
        for (Index p = 0; p < n_ks; ++p) {
            report.value(m, p) = curve.points[static_cast<std::size_t>(p)].value;
        }
    }
    auto first_max = [](const auto& column) {
        Index best = 0;
        for (Index m = 1; m < column.size(); ++m) {
            if (column(m) > column(best)) {
                best = m;
            }
        }
        return static_cast<std::size_t>(best);
    };
    report.best_by_accuracy = first_max(report.accuracy);
    for (Index p = 0; p < n_ks; ++p) {
        const auto best = first_max(report.value.col(p));
        report.best_by_value.push_back(best);
        report.crossover.push_back(best != report.best_by_accuracy);
    }
    return report;
}

} // namespace selval
