#include "selval/cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "selval/calib_metrics.hpp"
#include "selval/calibrate.hpp"
#include "selval/cost.hpp"
#include "selval/dataset.hpp"
#include "selval/harness.hpp"
#include "selval/selective.hpp"
#include "selval/serialize.hpp"
#include "selval/synthetic.hpp"

namespace selval {

namespace {

struct DataOptions {
    std::string kind = "probabilities";
    std::optional<int> classes;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--kind", kind, "Score kind of input files")
            ->check(CLI::IsMember({"probabilities", "logits"}));
        cmd->add_option("--classes", classes, "Number of classes (inferred when omitted)");
    }

    LabeledDataset load(const std::string& path) const
    {
        return load_dataset(path, parse_score_kind(kind), classes);
    }
};

struct CostOptions {
    std::optional<double> k;
    std::optional<double> k_fp;
    std::optional<double> k_fn;
    int positive_class = 1;
    std::string cost_file;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--k", k, "Uniform error cost");
        cmd->add_option("--k-fp", k_fp, "False-positive cost (binary)");
        cmd->add_option("--k-fn", k_fn, "False-negative cost (binary)");
        cmd->add_option("--positive-class", positive_class, "Positive class for binary costs");
        cmd->add_option("--cost", cost_file, "Cost spec JSON file");
    }

    CostSpec spec() const
    {
        if (!cost_file.empty()) {
            return cost_from_json(read_json_file(cost_file));
        }
        if (k_fp || k_fn) {
            if (!k_fp || !k_fn) {
                throw ValidationError("binary costs need both --k-fp and --k-fn");
            }
            CostSpec s = BinaryAsymmetricCost{*k_fp, *k_fn, positive_class};
            validate_cost(s);
            return s;
        }
        if (!k) {
            throw ValidationError("a cost is required: --k, --k-fp/--k-fn or --cost");
        }
        CostSpec s = UniformCost{*k};
        validate_cost(s);
        return s;
    }
};

struct OutputOptions {
    std::string format;
    std::string out_path;

    void attach(CLI::App* cmd, const std::string& default_format,
                std::vector<std::string> formats = {"json", "csv", "md", "text"})
    {
        format = default_format;
        cmd->add_option("--format", format, "Output format")->check(CLI::IsMember(formats));
        cmd->add_option("--out", out_path, "Write output to this file instead of stdout");
    }

    void emit(std::ostream& fallback, const std::function<void(std::ostream&)>& write) const
    {
        if (out_path.empty() || out_path == "-") {
            write(fallback);
            return;
        }
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
            throw IoError("cannot write '" + out_path + "'");
        }
        write(file);
        if (!file) {
            throw IoError("write failed for '" + out_path + "'");
        }
    }
};

std::string trimmed(double x)
{
    auto s = fixed6(x);
    if (s.find('.') != std::string::npos) {
        while (!s.empty() && s.back() == '0') {
            s.pop_back();
        }
        if (!s.empty() && s.back() == '.') {
            s.pop_back();
        }
    }
    return s;
}

std::string policy_text(const ThresholdPolicy& policy)
{
    if (const auto* g = std::get_if<GlobalThreshold>(&policy)) {
        return trimmed(g->tau);
    }
    const auto& taus = std::get<PerClassThreshold>(policy).taus;
    std::string s;
    for (Index j = 0; j < taus.size(); ++j) {
        s += (j ? " " : "") + trimmed(taus(j));
    }
    return s;
}

std::vector<std::string> split_list(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) {
            parts.push_back(item);
        }
    }
    return parts;
}

struct GridOptions {
    std::string config_file;
    std::optional<double> k_min;
    std::optional<double> k_max;
    std::optional<double> k_step;
    std::string rules;
    std::optional<double> tau;
    bool calibrate_first = false;
    std::string mode;
    std::string asymmetric;
    std::optional<int> positive_class;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--config", config_file, "JSON file mirroring the curve configuration");
        cmd->add_option("--k-min", k_min, "Smallest k (default 0)");
        cmd->add_option("--k-max", k_max, "Largest k (default 10)");
        cmd->add_option("--k-step", k_step, "Grid step (default 0.25)");
        cmd->add_option("--rules", rules,
                        "Comma list of theoretical,empirical_tune,empirical_test,fixed");
        cmd->add_option("--tau", tau, "Threshold for the fixed rule");
        cmd->add_flag("--calibrate-first", calibrate_first,
                      "Fit a temperature on the tune split and apply it to both splits");
        cmd->add_option("--mode", mode, "Empirical threshold mode")
            ->check(CLI::IsMember({"global", "per_class"}));
        cmd->add_option("--asymmetric", asymmetric, "Binary cost sweep: fixed_1 or equal")
            ->check(CLI::IsMember({"fixed_1", "equal"}));
        cmd->add_option("--positive-class", positive_class, "Positive class for binary sweeps");
    }

    CurveConfig config() const
    {
        CurveConfig c;
        if (!config_file.empty()) {
            c = curve_config_from_json(read_json_file(config_file));
        }
        if (k_min) {
            c.k_min = *k_min;
        }
        if (k_max) {
            c.k_max = *k_max;
        }
        if (k_step) {
            c.k_step = *k_step;
        }
        if (!rules.empty()) {
            c.rules.clear();
            for (const auto& r : split_list(rules, ',')) {
                c.rules.push_back(parse_curve_rule(r));
            }
        }
        if (tau) {
            c.fixed_tau = *tau;
        }
        if (calibrate_first) {
            c.calibrate_first = true;
        }
        if (!mode.empty()) {
            c.threshold_mode = parse_threshold_mode(mode);
        }
        if (!asymmetric.empty()) {
            AsymmetricConfig a = c.asymmetric.value_or(AsymmetricConfig{});
            a.mode = parse_asymmetric_mode(asymmetric);
            c.asymmetric = a;
        }
        if (positive_class && c.asymmetric) {
            c.asymmetric->positive_class = *positive_class;
        }
        return c;
    }
};

void warn_split(const LabeledDataset& tune, const LabeledDataset& test, std::ostream& err)
{
    const auto diag = split_check(tune, test);
    if (diag.class_mismatch) {
        throw ValidationError("tune and test splits have different class counts");
    }
    if (diag.overlap > 0) {
        err << "warning: " << diag.overlap << " ids appear in both tune ('" << tune.name()
            << "') and test ('" << test.name() << "')\n";
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Value-based evaluation of selective classifiers"};
    app.name(args.empty() ? "selval" : args.front());
    app.require_subcommand(1);
    std::function<void()> action;

    // value
    auto* value_cmd = app.add_subcommand("value", "Value of one (cost, rule) evaluation");
    DataOptions value_data;
    CostOptions value_cost;
    OutputOptions value_out;
    std::string value_test, value_tune, value_rule = "theoretical", value_mode = "global";
    std::optional<double> value_tau;
    value_cmd->add_option("--test", value_test, "Evaluation dataset ('-' for stdin)")->required();
    value_cmd->add_option("--tune", value_tune, "Tuning dataset for empirical_tune");
    value_cmd->add_option("--rule", value_rule, "Threshold rule")
        ->check(CLI::IsMember({"theoretical", "empirical_tune", "empirical_test", "fixed"}));
    value_cmd->add_option("--tau", value_tau, "Threshold for the fixed rule");
    value_cmd->add_option("--mode", value_mode, "Empirical threshold mode")
        ->check(CLI::IsMember({"global", "per_class"}));
    value_data.attach(value_cmd);
    value_cost.attach(value_cmd);
    value_out.attach(value_cmd, "text");
    value_cmd->callback([&] {
        action = [&] {
            const auto spec = value_cost.spec();
            const auto test = value_data.load(value_test);
            const auto rule = parse_curve_rule(value_rule);
            const auto mode = parse_threshold_mode(value_mode);
            ThresholdPolicy policy;
            switch (rule) {
            case CurveRule::theoretical:
                policy = theoretical_threshold(spec);
                break;
            case CurveRule::empirical_tune: {
                if (value_tune.empty()) {
                    throw ValidationError("rule empirical_tune requires --tune");
                }
                const auto tune = value_data.load(value_tune);
                warn_split(tune, test, err);
                policy = empirical_threshold(tune, spec, mode).policy;
                break;
            }
            case CurveRule::empirical_test:
                policy = empirical_threshold(test, spec, mode).policy;
                break;
            case CurveRule::fixed:
                if (!value_tau) {
                    throw ValidationError("rule fixed requires --tau");
                }
                policy = GlobalThreshold{*value_tau};
                break;
            }
            const auto point = value_at(test, spec, policy);
            value_out.emit(out, [&](std::ostream& os) {
                if (value_out.format == "json") {
                    os << to_json(point).dump(2) << '\n';
                } else if (value_out.format == "csv") {
                    os << "tau,rho,alpha,value\n"
                       << describe(point.policy) << ',' << fixed6(point.rho) << ','
                       << fixed6(point.alpha) << ',' << fixed6(point.value) << '\n';
                } else if (value_out.format == "md") {
                    os << "| tau | rho | alpha | value |\n|---:|---:|---:|---:|\n| "
                       << describe(point.policy) << " | " << fixed6(point.rho) << " | "
                       << fixed6(point.alpha) << " | " << fixed6(point.value) << " |\n";
                } else {
                    os << trimmed(point.value) << '\n';
                }
            });
        };
    });

    // threshold
    auto* thr_cmd = app.add_subcommand("threshold", "Print the theoretical or empirical threshold");
    DataOptions thr_data;
    CostOptions thr_cost;
    OutputOptions thr_out;
    std::string thr_rule = "theoretical", thr_tune, thr_mode = "global";
    thr_cmd->add_option("--rule", thr_rule, "theoretical or empirical")
        ->check(CLI::IsMember({"theoretical", "empirical"}));
    thr_cmd->add_option("--tune", thr_tune, "Tuning dataset for the empirical rule");
    thr_cmd->add_option("--mode", thr_mode, "Empirical threshold mode")
        ->check(CLI::IsMember({"global", "per_class"}));
    thr_data.attach(thr_cmd);
    thr_cost.attach(thr_cmd);
    thr_out.attach(thr_cmd, "text", {"json", "text"});
    thr_cmd->callback([&] {
        action = [&] {
            const auto spec = thr_cost.spec();
            json report;
            ThresholdPolicy policy;
            if (parse_threshold_rule(thr_rule) == ThresholdRule::theoretical) {
                policy = theoretical_threshold(spec);
                report = to_json(policy);
            } else {
                if (thr_tune.empty()) {
                    throw ValidationError("the empirical rule requires --tune");
                }
                const auto result = empirical_threshold(thr_data.load(thr_tune), spec,
                                                        parse_threshold_mode(thr_mode));
                policy = result.policy;
                report = to_json(result);
            }
            thr_out.emit(out, [&](std::ostream& os) {
                if (thr_out.format == "json") {
                    os << report.dump(2) << '\n';
                } else {
                    os << policy_text(policy) << '\n';
                }
            });
        };
    });

    // curve
    auto* curve_cmd = app.add_subcommand("curve", "Value curves over a k grid");
    DataOptions curve_data;
    GridOptions curve_grid;
    OutputOptions curve_out;
    std::vector<std::string> curve_tests, curve_tunes, curve_names;
    bool curve_average = false;
    curve_cmd->add_option("--test", curve_tests, "Test dataset (repeatable)")->required();
    curve_cmd->add_option("--tune", curve_tunes, "Tune dataset, paired with --test (repeatable)");
    curve_cmd->add_option("--name", curve_names, "Model name per pair (default: file stem)");
    curve_cmd->add_flag("--average", curve_average, "Average values pointwise over all pairs");
    curve_data.attach(curve_cmd);
    curve_grid.attach(curve_cmd);
    curve_out.attach(curve_cmd, "csv", {"json", "csv", "md"});
    curve_cmd->callback([&] {
        action = [&] {
            const auto config = curve_grid.config();
            if (!curve_tunes.empty() && curve_tunes.size() != curve_tests.size()) {
                throw ValidationError("give one --tune per --test");
            }
            if (!curve_names.empty() && curve_names.size() != curve_tests.size()) {
                throw ValidationError("give one --name per --test");
            }
            std::vector<ValueCurve> curves;
            for (std::size_t i = 0; i < curve_tests.size(); ++i) {
                const auto test = curve_data.load(curve_tests[i]);
                std::optional<LabeledDataset> tune;
                if (!curve_tunes.empty()) {
                    tune = curve_data.load(curve_tunes[i]);
                    warn_split(*tune, test, err);
                }
                const auto name = curve_names.empty() ? test.name() : curve_names[i];
                for (auto& c : run_curve(tune, test, config, name)) {
                    curves.push_back(std::move(c));
                }
            }
            if (curve_average) {
                std::vector<ValueCurve> averaged;
                for (auto rule : config.rules) {
                    std::vector<ValueCurve> same;
                    for (const auto& c : curves) {
                        if (c.rule == rule) {
                            same.push_back(c);
                        }
                    }
                    averaged.push_back(average_curves(same, "average"));
                }
                curves = std::move(averaged);
            }
            curve_out.emit(out, [&](std::ostream& os) {
                if (curve_out.format == "json") {
                    os << to_json(curves).dump(2) << '\n';
                } else if (curve_out.format == "md") {
                    write_curves_md(os, curves);
                } else {
                    write_curves_csv(os, curves);
                }
            });
        };
    });

    // compare
    auto* cmp_cmd = app.add_subcommand("compare", "Accuracy vs value model comparison");
    DataOptions cmp_data;
    GridOptions cmp_grid;
    OutputOptions cmp_out;
    std::vector<std::string> cmp_models;
    cmp_cmd->add_option("--model", cmp_models, "NAME=TEST[,TUNE] (repeatable, at least two)")
        ->required();
    cmp_data.attach(cmp_cmd);
    cmp_grid.attach(cmp_cmd);
    cmp_out.attach(cmp_cmd, "md", {"json", "csv", "md"});
    cmp_cmd->callback([&] {
        action = [&] {
            std::vector<ModelSplits> models;
            for (const auto& spec : cmp_models) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw ValidationError("--model expects NAME=TEST[,TUNE], got '" + spec + "'");
                }
                const auto paths = split_list(spec.substr(eq + 1), ',');
                if (paths.empty() || paths.size() > 2) {
                    throw ValidationError("--model expects NAME=TEST[,TUNE], got '" + spec + "'");
                }
                ModelSplits m{spec.substr(0, eq), std::nullopt, cmp_data.load(paths[0])};
                if (paths.size() == 2) {
                    m.tune = cmp_data.load(paths[1]);
                    warn_split(*m.tune, m.test, err);
                }
                models.push_back(std::move(m));
            }
            const auto report = run_compare(std::move(models), cmp_grid.config());
            cmp_out.emit(out, [&](std::ostream& os) {
                if (cmp_out.format == "json") {
                    os << to_json(report).dump(2) << '\n';
                } else if (cmp_out.format == "csv") {
                    write_compare_csv(os, report);
                } else {
                    write_compare_md(os, report);
                }
            });
        };
    });

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "Fit, save or apply a temperature scaler");
    DataOptions cal_data;
    OutputOptions cal_out;
    std::string cal_tune, cal_load, cal_save, cal_apply, cal_apply_out;
    cal_cmd->add_option("--tune", cal_tune, "Dataset to fit the temperature on");
    cal_cmd->add_option("--load", cal_load, "Use a saved scaler instead of fitting");
    cal_cmd->add_option("--save", cal_save, "Write the scaler JSON here");
    cal_cmd->add_option("--apply", cal_apply, "Dataset to rescale with the scaler");
    cal_cmd->add_option("--apply-out", cal_apply_out, "Where to write the rescaled dataset")
        ->needs(cal_cmd->get_option("--apply"));
    cal_data.attach(cal_cmd);
    cal_out.attach(cal_cmd, "json", {"json", "text"});
    cal_cmd->callback([&] {
        action = [&] {
            TemperatureScaler scaler;
            if (!cal_load.empty()) {
                scaler = scaler_from_json(read_json_file(cal_load));
            } else if (!cal_tune.empty()) {
                scaler = fit_temperature(cal_data.load(cal_tune));
            } else {
                throw ValidationError("calibrate needs --tune or --load");
            }
            if (!cal_save.empty()) {
                std::ofstream file(cal_save);
                if (!file) {
                    throw IoError("cannot write '" + cal_save + "'");
                }
                file << to_json(scaler).dump(2) << '\n';
            }
            if (!cal_apply.empty()) {
                const auto rescaled = apply_temperature(scaler, cal_data.load(cal_apply));
                if (cal_apply_out.empty()) {
                    throw ValidationError("--apply requires --apply-out");
                }
                save_dataset(cal_apply_out, rescaled);
            }
            cal_out.emit(out, [&](std::ostream& os) {
                if (cal_out.format == "json") {
                    os << to_json(scaler).dump(2) << '\n';
                } else {
                    os << shortest(scaler.temperature) << '\n';
                }
            });
        };
    });

    // ece
    auto* ece_cmd = app.add_subcommand("ece", "Confidence-binned expected calibration error");
    DataOptions ece_data;
    OutputOptions ece_out;
    std::string ece_path;
    int ece_bins = kDefaultEceBins;
    ece_cmd->add_option("--data", ece_path, "Dataset")->required();
    ece_cmd->add_option("--bins", ece_bins, "Number of equal-width bins");
    ece_data.attach(ece_cmd);
    ece_out.attach(ece_cmd, "json");
    ece_cmd->callback([&] {
        action = [&] {
            const auto report = ece(ece_data.load(ece_path), ece_bins);
            ece_out.emit(out, [&](std::ostream& os) {
                if (ece_out.format == "json") {
                    os << to_json(report).dump(2) << '\n';
                } else if (ece_out.format == "csv") {
                    write_ece_csv(os, report);
                } else if (ece_out.format == "md") {
                    write_ece_md(os, report);
                } else {
                    os << trimmed(report.ece) << '\n';
                }
            });
        };
    });

    // abece and density share sampling flags.
    struct SamplingOptions {
        std::string path;
        int n = kDefaultSampleSize;
        int samples = kDefaultNumSamples;
        std::uint64_t seed = 0;
        int threads = 1;

        void attach(CLI::App* cmd)
        {
            cmd->add_option("--data", path, "Dataset")->required();
            cmd->add_option("--n", n, "Items per sample");
            cmd->add_option("--samples", samples, "Number of samples N");
            cmd->add_option("--seed", seed, "RNG seed (default 0)");
            cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
        }
    };

    auto* abece_cmd = app.add_subcommand("abece", "Accuracy-binned calibration error");
    DataOptions abece_data;
    OutputOptions abece_out;
    SamplingOptions abece_opts;
    abece_opts.attach(abece_cmd);
    abece_data.attach(abece_cmd);
    abece_out.attach(abece_cmd, "json");
    abece_cmd->callback([&] {
        action = [&] {
            const auto report = abece(abece_data.load(abece_opts.path), abece_opts.n,
                                      abece_opts.samples, abece_opts.seed, abece_opts.threads);
            abece_out.emit(out, [&](std::ostream& os) {
                if (abece_out.format == "json") {
                    os << to_json(report).dump(2) << '\n';
                } else if (abece_out.format == "csv") {
                    write_abece_csv(os, report);
                } else {
                    write_abece_md(os, report);
                }
            });
        };
    });

    auto* dens_cmd = app.add_subcommand("density", "Joint accuracy/confidence density of samples");
    DataOptions dens_data;
    OutputOptions dens_out;
    SamplingOptions dens_opts;
    int dens_bins = kDefaultConfidenceBins;
    dens_opts.attach(dens_cmd);
    dens_cmd->add_option("--conf-bins", dens_bins, "Confidence bins over [0,1]");
    dens_data.attach(dens_cmd);
    dens_out.attach(dens_cmd, "json");
    dens_cmd->callback([&] {
        action = [&] {
            const auto density =
                joint_density(dens_data.load(dens_opts.path), dens_opts.n, dens_opts.samples,
                              dens_bins, dens_opts.seed, dens_opts.threads);
            dens_out.emit(out, [&](std::ostream& os) {
                if (dens_out.format == "json") {
                    os << to_json(density).dump(2) << '\n';
                } else if (dens_out.format == "csv") {
                    write_density_csv(os, density);
                } else {
                    write_density_md(os, density);
                }
            });
        };
    });

    // gain
    auto* gain_cmd = app.add_subcommand("gain", "Value gained by recalibration");
    DataOptions gain_data;
    CostOptions gain_cost;
    OutputOptions gain_out;
    std::string gain_before, gain_after, gain_rule = "theoretical", gain_tb, gain_ta;
    gain_cmd->add_option("--before", gain_before, "Original model outputs")->required();
    gain_cmd->add_option("--after", gain_after, "Recalibrated model outputs")->required();
    gain_cmd->add_option("--rule", gain_rule, "theoretical or empirical")
        ->check(CLI::IsMember({"theoretical", "empirical"}));
    gain_cmd->add_option("--tune-before", gain_tb, "Tune split for the original model");
    gain_cmd->add_option("--tune-after", gain_ta, "Tune split for the recalibrated model");
    gain_data.attach(gain_cmd);
    gain_cost.attach(gain_cmd);
    gain_out.attach(gain_cmd, "json", {"json", "text"});
    gain_cmd->callback([&] {
        action = [&] {
            const auto spec = gain_cost.spec();
            const auto before = gain_data.load(gain_before);
            const auto after = gain_data.load(gain_after);
            if (gain_tb.empty() != gain_ta.empty()) {
                throw ValidationError("give both --tune-before and --tune-after, or neither");
            }
            CalibrationGain gain;
            if (!gain_tb.empty()) {
                const auto tb = gain_data.load(gain_tb);
                const auto ta = gain_data.load(gain_ta);
                gain = calibration_gain(before, after, spec, parse_threshold_rule(gain_rule),
                                        GainTuning{tb, ta});
            } else {
                gain = calibration_gain(before, after, spec, parse_threshold_rule(gain_rule));
            }
            if (!gain.argmax_equal) {
                err << "warning: " << gain.argmax_differences
                    << " items change their predicted class; the gain mixes calibration with "
                       "accuracy changes\n";
            }
            gain_out.emit(out, [&](std::ostream& os) {
                if (gain_out.format == "json") {
                    os << to_json(gain).dump(2) << '\n';
                } else {
                    os << trimmed(gain.gain) << '\n';
                }
            });
        };
    });

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Emit synthetic prediction datasets (JSONL)");
    std::string synth_model = "m1", synth_out = "-";
    int synth_items = 1000, synth_classes = 10;
    double synth_concentration = 0.5;
    std::uint64_t synth_seed = 0;
    std::vector<std::string> synth_components;
    std::optional<double> synth_distort;
    synth_cmd->add_option("--model", synth_model, "m1, m2, m3, impulse or calibrated")
        ->check(CLI::IsMember({"m1", "m2", "m3", "impulse", "calibrated"}));
    synth_cmd->add_option("--items", synth_items, "Number of items");
    synth_cmd->add_option("--classes", synth_classes, "Number of classes");
    synth_cmd->add_option("--seed", synth_seed, "RNG seed (default 0)");
    synth_cmd->add_option("--concentration", synth_concentration,
                          "Dirichlet concentration for --model calibrated");
    synth_cmd->add_option("--component", synth_components,
                          "WEIGHT:CONFIDENCE:ACCURACY for --model impulse (repeatable)");
    synth_cmd->add_option("--distort", synth_distort, "Apply softmax(log p / T) afterwards");
    synth_cmd->add_option("--out", synth_out, "Output JSONL path ('-' for stdout)");
    synth_cmd->callback([&] {
        action = [&] {
            LabeledDataset data;
            if (synth_model == "calibrated") {
                data = generate_calibrated(synth_items, synth_classes, synth_concentration,
                                           synth_seed);
            } else if (synth_model == "impulse") {
                ImpulseSpec spec;
                spec.items = synth_items;
                spec.num_classes = synth_classes;
                spec.seed = synth_seed;
                for (const auto& c : synth_components) {
                    const auto parts = split_list(c, ':');
                    if (parts.size() != 3) {
                        throw ValidationError("--component expects W:C:A, got '" + c + "'");
                    }
                    try {
                        spec.components.push_back(
                            {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])});
                    } catch (const std::exception&) {
                        throw ValidationError("--component expects numbers, got '" + c + "'");
                    }
                }
                data = generate_impulse(spec, "impulse");
            } else {
                data = generate_impulse(
                    impulse_preset(synth_model, synth_items, synth_seed, synth_classes),
                    synth_model);
            }
            if (synth_distort) {
                data = distort(data, *synth_distort);
            }
            if (synth_out == "-") {
                write_jsonl(out, data);
            } else {
                save_dataset(synth_out, data);
            }
        };
    });

    // split
    auto* split_cmd = app.add_subcommand("split", "Check tune/test separation");
    DataOptions split_data;
    std::string split_tune, split_test;
    bool split_strict = false;
    split_cmd->add_option("--tune", split_tune, "Tune dataset")->required();
    split_cmd->add_option("--test", split_test, "Test dataset")->required();
    split_cmd->add_flag("--strict", split_strict, "Exit 1 on any overlap or class mismatch");
    split_data.attach(split_cmd);
    split_cmd->callback([&] {
        action = [&] {
            const auto diag = split_check(split_data.load(split_tune), split_data.load(split_test));
            out << to_json(diag).dump(2) << '\n';
            if (split_strict && (diag.overlap > 0 || diag.class_mismatch)) {
                throw ValidationError("splits overlap or disagree on class count");
            }
        };
    });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    if (argv.empty()) {
        argv.push_back("selval");
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return kExitValidation;
    }

    try {
        if (action) {
            action();
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        // malformed JSON configs and the like
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}

} // namespace selval
