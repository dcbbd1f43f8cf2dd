#include "selval/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include "overloaded.hpp"

namespace selval {

namespace {

using detail::overloaded;

template <typename T>
T field(const json& j, const char* key)
{
    if (!j.contains(key)) {
        throw ValidationError(std::string("missing field '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("field '") + key + "' has the wrong type");
    }
}

json vector_json(const Eigen::VectorXd& v)
{
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) {
        arr.push_back(v(i));
    }
    return arr;
}

json nullable(double x, bool present)
{
    return present ? json(x) : json(nullptr);
}

std::string fixed3(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

} // namespace

json to_json(const CostSpec& spec)
{
    return std::visit(
        overloaded{[](const UniformCost& u) { return json{{"kind", "uniform"}, {"k", u.k}}; },
                   [](const BinaryAsymmetricCost& b) {
                       return json{{"kind", "binary"},
                                   {"k_fp", b.k_fp},
                                   {"k_fn", b.k_fn},
                                   {"positive_class", b.positive_class}};
                   },
                   [](const FullCost& f) {
                       json rows = json::array();
                       for (Index i = 0; i < f.v_w.rows(); ++i) {
                           rows.push_back(vector_json(f.v_w.row(i).transpose()));
                       }
                       return json{{"kind", "full"}, {"v_r", f.v_r}, {"v_c", f.v_c}, {"v_w", rows}};
                   }},
        spec);
}

CostSpec cost_from_json(const json& j)
{
    if (!j.is_object()) {
        throw ValidationError("cost spec must be a JSON object");
    }
    const auto kind = field<std::string>(j, "kind");
    CostSpec spec;
    if (kind == "uniform") {
        spec = UniformCost{field<double>(j, "k")};
    } else if (kind == "binary") {
        spec = BinaryAsymmetricCost{field<double>(j, "k_fp"), field<double>(j, "k_fn"),
                                    j.contains("positive_class") ? field<int>(j, "positive_class")
                                                                 : 1};
    } else if (kind == "full") {
        const auto rows = field<std::vector<std::vector<double>>>(j, "v_w");
        FullCost f;
        f.v_r = j.contains("v_r") ? field<double>(j, "v_r") : 0.0;
        f.v_c = j.contains("v_c") ? field<double>(j, "v_c") : 1.0;
        const auto n = static_cast<Index>(rows.size());
        f.v_w.resize(n, n);
        for (Index r = 0; r < n; ++r) {
            if (static_cast<Index>(rows[static_cast<std::size_t>(r)].size()) != n) {
                throw ValidationError("v_w must be square");
            }
            for (Index c = 0; c < n; ++c) {
                f.v_w(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            }
        }
        spec = f;
    } else {
        throw ValidationError("unknown cost kind '" + kind + "' (expected uniform|binary|full)");
    }
    validate_cost(spec);
    return spec;
}

json to_json(const ThresholdPolicy& policy)
{
    if (const auto* g = std::get_if<GlobalThreshold>(&policy)) {
        return json{{"kind", "global"}, {"tau", nullable(g->tau, !std::isnan(g->tau))}};
    }
    return json{{"kind", "per_class"}, {"taus", vector_json(std::get<PerClassThreshold>(policy).taus)}};
}

ThresholdPolicy policy_from_json(const json& j)
{
    if (!j.is_object()) {
        throw ValidationError("policy must be a JSON object");
    }
    const auto kind = field<std::string>(j, "kind");
    if (kind == "global") {
        ThresholdPolicy p = GlobalThreshold{field<double>(j, "tau")};
        validate_policy(p, 1);
        return p;
    }
    if (kind == "per_class") {
        const auto taus = field<std::vector<double>>(j, "taus");
        PerClassThreshold p{Eigen::Map<const Eigen::VectorXd>(taus.data(),
                                                              static_cast<Index>(taus.size()))};
        validate_policy(p, static_cast<int>(taus.size()));
        return p;
    }
    throw ValidationError("unknown policy kind '" + kind + "' (expected global|per_class)");
}

json to_json(const TemperatureScaler& scaler)
{
    return json{{"temperature", scaler.temperature},
                {"fit_nll", scaler.fit_nll},
                {"fit_iterations", scaler.fit_iterations},
                {"status", to_string(scaler.status)}};
}

TemperatureScaler scaler_from_json(const json& j)
{
    TemperatureScaler s;
    s.temperature = field<double>(j, "temperature");
    if (!(s.temperature >= kMinTemperature && s.temperature <= kMaxTemperature)) {
        throw ValidationError("temperature outside [0.01, 100]");
    }
    s.fit_nll = j.contains("fit_nll") ? field<double>(j, "fit_nll") : 0.0;
    s.fit_iterations = j.contains("fit_iterations") ? field<std::size_t>(j, "fit_iterations") : 0;
    return s;
}

CurveConfig curve_config_from_json(const json& j)
{
    if (!j.is_object()) {
        throw ValidationError("curve config must be a JSON object");
    }
    CurveConfig c;
    if (j.contains("k_min")) {
        c.k_min = field<double>(j, "k_min");
    }
    if (j.contains("k_max")) {
        c.k_max = field<double>(j, "k_max");
    }
    if (j.contains("k_step")) {
        c.k_step = field<double>(j, "k_step");
    }
    if (j.contains("rules")) {
        c.rules.clear();
        for (const auto& r : field<std::vector<std::string>>(j, "rules")) {
            c.rules.push_back(parse_curve_rule(r));
        }
    }
    if (j.contains("fixed_tau")) {
        c.fixed_tau = field<double>(j, "fixed_tau");
    }
    if (j.contains("calibrate_first")) {
        c.calibrate_first = field<bool>(j, "calibrate_first");
    }
    if (j.contains("threshold_mode")) {
        c.threshold_mode = parse_threshold_mode(field<std::string>(j, "threshold_mode"));
    }
    if (j.contains("asymmetric") && !j["asymmetric"].is_null()) {
        const auto& a = j["asymmetric"];
        AsymmetricConfig ac;
        if (a.contains("k_fp_mode")) {
            ac.mode = parse_asymmetric_mode(field<std::string>(a, "k_fp_mode"));
        }
        if (a.contains("positive_class")) {
            ac.positive_class = field<int>(a, "positive_class");
        }
        c.asymmetric = ac;
    }
    return c;
}

json to_json(const ValuePoint& point)
{
    return json{{"cost", to_json(point.spec)},
                {"policy", to_json(point.policy)},
                {"rho", point.rho},
                {"alpha", point.alpha},
                {"value", point.value}};
}

json to_json(const ThresholdSearchResult& result)
{
    return json{{"policy", to_json(result.policy)},
                {"tune_value", result.tune_value},
                {"candidates_evaluated", result.candidates_evaluated}};
}

json to_json(const SplitDiagnostics& diag)
{
    return json{{"overlap", diag.overlap}, {"class_mismatch", diag.class_mismatch}};
}

json to_json(const EceReport& report)
{
    json bins = json::array();
    for (const auto& b : report.bins) {
        bins.push_back({{"lo", b.lo},
                        {"hi", b.hi},
                        {"count", b.count},
                        {"mass", b.mass},
                        {"mean_confidence", nullable(b.mean_confidence, b.count > 0)},
                        {"accuracy", nullable(b.accuracy, b.count > 0)}});
    }
    return json{{"num_bins", report.num_bins}, {"ece", report.ece}, {"bins", bins}};
}

json to_json(const AbeceReport& report)
{
    json bins = json::array();
    for (const auto& b : report.bins) {
        bins.push_back({{"a", b.a},
                        {"count", b.count},
                        {"mass", b.mass},
                        {"mean_confidence", nullable(b.mean_confidence, b.count > 0)},
                        {"residual", nullable(b.residual, b.count > 0)}});
    }
    return json{{"sample_size", report.sample_size},
                {"num_samples", report.num_samples},
                {"seed", report.seed},
                {"abece_sum", report.abece_sum},
                {"abece_weighted", report.abece_weighted},
                {"bins", bins}};
}

json to_json(const JointDensity& density)
{
    json mass = json::array();
    for (Index r = 0; r < density.mass.rows(); ++r) {
        mass.push_back(vector_json(density.mass.row(r).transpose()));
    }
    return json{{"sample_size", density.sample_size},
                {"num_samples", density.num_samples},
                {"seed", density.seed},
                {"accuracy_levels", vector_json(density.accuracy_levels)},
                {"confidence_edges", vector_json(density.confidence_edges)},
                {"mass", mass}};
}

json to_json(const CalibrationGain& gain)
{
    return json{{"cost", to_json(gain.spec)},
                {"value_before", gain.value_before},
                {"value_after", gain.value_after},
                {"gain", gain.gain},
                {"argmax_equal", gain.argmax_equal},
                {"argmax_differences", gain.argmax_differences},
                {"status", gain.argmax_equal ? "ok" : "warning: predictions differ"}};
}

json to_json(const std::vector<ValueCurve>& curves)
{
    json out = json::array();
    for (const auto& c : curves) {
        json points = json::array();
        for (const auto& p : c.points) {
            points.push_back({{"k", p.k},
                              {"policy", to_json(p.policy)},
                              {"rho", p.rho},
                              {"alpha", p.alpha},
                              {"value", p.value}});
        }
        json meta{{"used_tune", c.metadata.used_tune},
                  {"averaged_over", c.metadata.averaged_over}};
        if (c.metadata.temperature) {
            meta["temperature"] = *c.metadata.temperature;
            meta["calibration_split"] = c.metadata.calibration_split;
        }
        out.push_back({{"model", c.model},
                       {"rule", to_string(c.rule)},
                       {"metadata", meta},
                       {"points", points}});
    }
    return out;
}

json to_json(const CompareReport& report)
{
    json models = json::array();
    for (std::size_t m = 0; m < report.models.size(); ++m) {
        models.push_back({{"name", report.models[m]},
                          {"accuracy", report.accuracy(static_cast<Index>(m))},
                          {"values", vector_json(report.value.row(static_cast<Index>(m)).transpose())}});
    }
    json best = json::array();
    for (std::size_t p = 0; p < report.ks.size(); ++p) {
        best.push_back({{"k", report.ks[p]},
                        {"best_by_value", report.models[report.best_by_value[p]]},
                        {"crossover", static_cast<bool>(report.crossover[p])}});
    }
    return json{{"rule", to_string(report.rule)},
                {"ks", report.ks},
                {"models", models},
                {"best_by_accuracy", report.models[report.best_by_accuracy]},
                {"per_k", best},
                {"crossovers", report.crossover_count()}};
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": malformed JSON (" + e.what() + ")");
    }
}

std::string fixed6(double x)
{
    if (std::isnan(x)) {
        return "";
    }
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    // Avoid "-0.000000" for tiny negatives.
    if (std::string(buf) == "-0.000000") {
        return "0.000000";
    }
    return buf;
}

std::string shortest(double x)
{
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string policy_field(const ThresholdPolicy& policy)
{
    if (const auto* g = std::get_if<GlobalThreshold>(&policy)) {
        return fixed6(g->tau);
    }
    return describe(policy);
}

} // namespace

void write_curves_csv(std::ostream& out, const std::vector<ValueCurve>& curves)
{
    out << "model,rule,k,tau,rho,alpha,value\n";
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            out << c.model << ',' << to_string(c.rule) << ',' << fixed6(p.k) << ','
                << policy_field(p.policy) << ',' << fixed6(p.rho) << ',' << fixed6(p.alpha) << ','
                << fixed6(p.value) << '\n';
        }
    }
}

void write_curves_md(std::ostream& out, const std::vector<ValueCurve>& curves)
{
    out << "| model | rule | k | tau | rho | alpha | value |\n";
    out << "|---|---|---:|---:|---:|---:|---:|\n";
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            out << "| " << c.model << " | " << to_string(c.rule) << " | " << fixed6(p.k) << " | "
                << policy_field(p.policy) << " | " << fixed6(p.rho) << " | " << fixed6(p.alpha)
                << " | " << fixed6(p.value) << " |\n";
        }
    }
}

void write_abece_csv(std::ostream& out, const AbeceReport& report)
{
    out << "a,mass,mean_conf,residual\n";
    for (const auto& b : report.bins) {
        out << fixed6(b.a) << ',' << fixed6(b.mass) << ','
            << (b.count > 0 ? fixed6(b.mean_confidence) : "") << ','
            << (b.count > 0 ? fixed6(b.residual) : "") << '\n';
    }
}

void write_abece_md(std::ostream& out, const AbeceReport& report)
{
    out << "ABECE n=" << report.sample_size << " N=" << report.num_samples
        << " seed=" << report.seed << ": sum=" << fixed6(report.abece_sum)
        << " weighted=" << fixed6(report.abece_weighted) << "\n\n";
    out << "| a | mass | mean_conf | residual |\n|---:|---:|---:|---:|\n";
    for (const auto& b : report.bins) {
        out << "| " << fixed6(b.a) << " | " << fixed6(b.mass) << " | "
            << (b.count > 0 ? fixed6(b.mean_confidence) : "-") << " | "
            << (b.count > 0 ? fixed6(b.residual) : "-") << " |\n";
    }
}

void write_density_csv(std::ostream& out, const JointDensity& density)
{
    out << "a,conf_lo,conf_hi,mass\n";
    for (Index r = 0; r < density.mass.rows(); ++r) {
        for (Index c = 0; c < density.mass.cols(); ++c) {
            out << fixed6(density.accuracy_levels(r)) << ','
                << fixed6(density.confidence_edges(c)) << ','
                << fixed6(density.confidence_edges(c + 1)) << ',' << fixed6(density.mass(r, c))
                << '\n';
        }
    }
}

void write_density_md(std::ostream& out, const JointDensity& density)
{
    out << "| a \\ conf |";
    for (Index c = 0; c < density.mass.cols(); ++c) {
        out << ' ' << fixed6(density.confidence_edges(c + 1)) << " |";
    }
    out << "\n|---|";
    for (Index c = 0; c < density.mass.cols(); ++c) {
        out << "---:|";
    }
    out << '\n';
    for (Index r = density.mass.rows() - 1; r >= 0; --r) {
        out << "| " << fixed6(density.accuracy_levels(r)) << " |";
        for (Index c = 0; c < density.mass.cols(); ++c) {
            out << ' ' << fixed6(density.mass(r, c)) << " |";
        }
        out << '\n';
    }
}

void write_ece_csv(std::ostream& out, const EceReport& report)
{
    out << "lo,hi,mass,mean_conf,accuracy\n";
    for (const auto& b : report.bins) {
        out << fixed6(b.lo) << ',' << fixed6(b.hi) << ',' << fixed6(b.mass) << ','
            << (b.count > 0 ? fixed6(b.mean_confidence) : "") << ','
            << (b.count > 0 ? fixed6(b.accuracy) : "") << '\n';
    }
}

void write_ece_md(std::ostream& out, const EceReport& report)
{
    out << "ECE (" << report.num_bins << " bins) = " << fixed6(report.ece) << "\n\n";
    out << "| lo | hi | mass | mean_conf | accuracy |\n|---:|---:|---:|---:|---:|\n";
    for (const auto& b : report.bins) {
        out << "| " << fixed6(b.lo) << " | " << fixed6(b.hi) << " | " << fixed6(b.mass) << " | "
            << (b.count > 0 ? fixed6(b.mean_confidence) : "-") << " | "
            << (b.count > 0 ? fixed6(b.accuracy) : "-") << " |\n";
    }
}

void write_compare_csv(std::ostream& out, const CompareReport& report)
{
    out << "model,accuracy,k,value,best_by_value,crossover\n";
    for (std::size_t m = 0; m < report.models.size(); ++m) {
        for (std::size_t p = 0; p < report.ks.size(); ++p) {
            out << report.models[m] << ',' << fixed6(report.accuracy(static_cast<Index>(m))) << ','
                << fixed6(report.ks[p]) << ','
                << fixed6(report.value(static_cast<Index>(m), static_cast<Index>(p))) << ','
                << (report.best_by_value[p] == m ? 1 : 0) << ','
                << (report.crossover[p] ? 1 : 0) << '\n';
        }
    }
}

void write_compare_md(std::ostream& out, const CompareReport& report)
{
    static constexpr double kColumns[] = {1.0, 2.0, 4.0, 8.0, 10.0};
    std::vector<std::optional<std::size_t>> cols;
    for (double k : kColumns) {
        std::optional<std::size_t> found;
        for (std::size_t p = 0; p < report.ks.size(); ++p) {
            if (std::abs(report.ks[p] - k) < 1e-9) {
                found = p;
            }
        }
        cols.push_back(found);
    }
    out << "| Model | Accuracy |";
    for (double k : kColumns) {
        out << " V (k=" << shortest(k) << ") |";
    }
    out << "\n|---|---:|";
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out << "---:|";
    }
    out << '\n';
    auto cell = [](const std::string& text, bool bold) {
        return bold ? "**" + text + "**" : text;
    };
    for (std::size_t m = 0; m < report.models.size(); ++m) {
        const auto mi = static_cast<Index>(m);
        out << "| " << report.models[m] << " | "
            << cell(fixed3(report.accuracy(mi)), report.best_by_accuracy == m) << " |";
        for (const auto& col : cols) {
            if (!col) {
                out << " - |";
                continue;
            }
            out << ' '
                << cell(fixed3(report.value(mi, static_cast<Index>(*col))),
                        report.best_by_value[*col] == m)
                << " |";
        }
        out << '\n';
    }
    out << "\nRule: " << to_string(report.rule) << ". Crossovers (best by value differs from best "
        << "by accuracy): " << report.crossover_count() << " of " << report.ks.size()
        << " grid points.\n";
}

} // namespace selval
