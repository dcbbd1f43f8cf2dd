// Acceptance checks. One line per criterion:
//   criterion N: PASS|FAIL  <detail>  [seconds / budget]
// Exit status is nonzero if any selected criterion fails.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "selval/calib_metrics.hpp"
#include "selval/calibrate.hpp"
#include "selval/harness.hpp"
#include "selval/selective.hpp"
#include "selval/serialize.hpp"
#include "selval/synthetic.hpp"

using namespace selval;
namespace st = selval::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

void fail(Outcome& o, const std::string& why)
{
    if (o.pass) {
        o.detail.clear();
    }
    o.pass = false;
    if (!o.detail.empty()) {
        o.detail += "; ";
    }
    o.detail += why;
}

// Binary stand-in with exactly `correct` of `n` right and top confidences
// spread over (0.5, 1]. A 0.5 row would be an argmax tie.
LabeledDataset binary_standin(int n, int correct, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> conf(501, 1000);
    std::uniform_int_distribution<int> cls(0, 1);
    std::vector<st::Item> items;
    for (int i = 0; i < n; ++i) {
        const int pred = cls(rng);
        const int label = i < correct ? pred : 1 - pred;
        items.push_back({pred, conf(rng) / 1000.0, label});
    }
    std::shuffle(items.begin(), items.end(), rng);
    return st::make_dataset(items, 2, "b");
}

Outcome criterion1()
{
    Outcome o;
    struct Row {
        double accuracy;
        double table_value;
    };
    const std::vector<Row> rows{{0.762, 0.524}, {0.842, 0.685}, {0.857, 0.715}};
    std::uint64_t seed = 1;
    for (const auto& row : rows) {
        const int n = 1000;
        const auto d = binary_standin(n, static_cast<int>(std::lround(row.accuracy * n)), seed++);
        const auto v =
            value_at(d, UniformCost{1.0}, theoretical_threshold(UniformCost{1.0})).value;
        const double identity = 2.0 * d.accuracy() - 1.0;
        if (std::abs(v - identity) > 1e-12) {
            fail(o, fmt("acc %.3f: V=%.12f but 2a-1=%.12f", row.accuracy, v, identity));
        }
        if (std::abs(v - row.table_value) > 0.002) {
            fail(o, fmt("acc %.3f: V=%.4f vs table %.3f", row.accuracy, v, row.table_value));
        }
        if (o.pass) {
            o.detail += fmt("%.3f->%.3f ", row.accuracy, v);
        }
    }
    return o;
}

// Closed form of an impulse model under tau = k/(k+1): each component is
// accepted while tau <= its confidence and then pays acc - k(1 - acc).
double impulse_closed_form(const ImpulseSpec& spec, double k)
{
    const double tau = k / (k + 1.0);
    double v = 0.0;
    for (const auto& c : spec.components) {
        if (tau <= c.confidence) {
            v += c.weight * (c.accuracy - k * (1.0 - c.accuracy));
        }
    }
    return v;
}

Outcome criterion2()
{
    Outcome o;
    std::vector<LabeledDataset> data;
    std::vector<ImpulseSpec> specs;
    for (const char* name : {"m1", "m2", "m3"}) {
        specs.push_back(impulse_preset(name, 1000, 0, 10));
        data.push_back(generate_impulse(specs.back(), name));
    }
    double worst = 0.0;
    for (double k : {0.0, 1.0, 1.5, 2.0, 4.0, 10.0}) {
        for (std::size_t m = 0; m < data.size(); ++m) {
            const auto v =
                value_at(data[m], UniformCost{k}, theoretical_threshold(UniformCost{k})).value;
            const double err = std::abs(v - impulse_closed_form(specs[m], k));
            worst = std::max(worst, err);
            if (err > 1e-9) {
                fail(o, fmt("m%.0f at k=%.2f off closed form by %.3g", m + 1.0, k, err));
            }
        }
    }
    std::string not_strict;
    for (double k : CurveConfig{}.k_grid()) {
        if (k <= 1.5) {
            continue;
        }
        const auto tau = theoretical_threshold(UniformCost{k});
        const double v1 = value_at(data[0], UniformCost{k}, tau).value;
        const double v2 = value_at(data[1], UniformCost{k}, tau).value;
        const double v3 = value_at(data[2], UniformCost{k}, tau).value;
        if (!(v2 > v1 && v3 > v1)) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%s%g(m1=%g,m2=%g,m3=%g)",
                          not_strict.empty() ? "" : " ", k, v1, v2, v3);
            not_strict += buf;
        }
    }
    if (!not_strict.empty()) {
        fail(o, "m2/m3 do not strictly exceed m1 at k =" + not_strict);
    }
    if (o.pass) {
        o.detail = fmt("closed forms within %.1e; strict dominance on all grid k > 1.5", worst);
    }
    return o;
}

Outcome criterion3()
{
    Outcome o;
    if (std::get<GlobalThreshold>(theoretical_threshold(UniformCost{1.0})).tau != 0.5) {
        fail(o, "theoretical_threshold(1) != 0.5");
    }
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(1000 + seed);
        const int classes = 2 + static_cast<int>(seed % 4);
        const auto d = st::random_grid_dataset(1000 + seed, 1000, classes);
        std::uniform_real_distribution<double> u(0.0, 10.0);
        CostSpec spec = UniformCost{u(rng)};
        if (classes == 2 && seed % 8 == 0) {
            spec = BinaryAsymmetricCost{u(rng), u(rng), static_cast<int>(seed % 3 == 0)};
        }
        const auto r = empirical_threshold(d, spec);
        const double brute = st::grid_scan_best(d, spec);
        const double err = std::abs(r.tune_value - brute);
        worst = std::max(worst, err);
        if (err > 1e-12) {
            fail(o, fmt("seed %.0f: search %.15f vs scan %.15f", static_cast<double>(seed),
                        r.tune_value, brute));
        }
    }
    if (o.pass) {
        o.detail = fmt("tau(1)=0.5; 50 datasets, max |search - scan| = %.1e", worst);
    }
    return o;
}

Outcome criterion4()
{
    Outcome o;
    CurveConfig config;
    config.rules = {CurveRule::theoretical, CurveRule::empirical_test};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto d = st::random_grid_dataset(5000 + seed, 1000, 2 + static_cast<int>(seed % 4));
        const auto curves = run_curve(std::nullopt, d, config, "r");
        const auto& theory = curves[0].points;
        const auto& best = curves[1].points;
        if (std::abs(theory.front().value - d.accuracy()) > 1e-15) {
            fail(o, fmt("seed %.0f: V(k=0)=%.15f vs accuracy %.15f", static_cast<double>(seed),
                        theory.front().value, d.accuracy()));
        }
        for (std::size_t p = 1; p < best.size(); ++p) {
            if (best[p].value > best[p - 1].value) {
                fail(o, fmt("seed %.0f: V* rises at k=%.2f", static_cast<double>(seed),
                            best[p].k));
            }
        }
    }
    if (o.pass) {
        o.detail = "20 datasets x 41 k: V* non-increasing, V(k=0) = accuracy";
    }
    return o;
}

Outcome criterion5()
{
    Outcome o;
    const auto clean = generate_calibrated(100000, 5, 1.0, 2024);
    const auto fit = fit_temperature(clean);
    if (fit.temperature < 0.98 || fit.temperature > 1.02) {
        fail(o, fmt("T on calibrated data = %.4f", fit.temperature));
    }
    const auto sharp = distort(clean, 0.5);
    const auto refit = fit_temperature(sharp);
    const auto restored = apply_temperature(refit, sharp);
    const double mae =
        (restored.probabilities() - clean.probabilities()).cwiseAbs().mean();
    if (mae > 1e-3) {
        fail(o, fmt("restoration MAE %.2e (T=%.4f)", mae, refit.temperature));
    }
    const double ece_sharp = ece(sharp, 10).ece;
    const double ece_fixed = ece(restored, 10).ece;
    const double reduction = 1.0 - ece_fixed / ece_sharp;
    if (reduction < 0.8) {
        fail(o, fmt("ECE %.4f -> %.4f, reduction %.1f%%", ece_sharp, ece_fixed, 100 * reduction));
    }
    if (sharp.predicted() != clean.predicted() || restored.predicted() != clean.predicted()) {
        fail(o, "argmax changed");
    }
    if (o.pass) {
        o.detail = fmt("T=%.4f; refit T=%.4f, MAE %.1e; ", fit.temperature, refit.temperature,
                       mae)
                   + fmt("ECE %.4f -> %.4f (-%.1f%%); argmax kept", ece_sharp, ece_fixed,
                         100 * reduction);
    }
    return o;
}

Outcome criterion6()
{
    Outcome o;
    const auto mixed = generate_calibrated(5000, 5, 0.7, 99);
    const std::uint64_t seed = 314;
    const std::string ref = to_json(abece(mixed, 20, 1000, seed, 1)).dump();
    for (int threads : {1, 2, 3, 4, 8}) {
        for (int run = 0; run < 2; ++run) {
            if (to_json(abece(mixed, 20, 1000, seed, threads)).dump() != ref) {
                fail(o, fmt("report differs with %.0f threads", threads));
            }
        }
    }
    const auto m1 = generate_impulse(impulse_preset("m1"), "m1");
    const auto r = abece(m1, 20, 1000, seed, 2);
    for (const auto& b : r.bins) {
        if (b.count > 0 && (b.mean_confidence != 0.6 || b.residual != 0.6 - b.a)) {
            fail(o, fmt("m1 bin a=%.2f: mean %.17g residual %.17g", b.a, b.mean_confidence,
                        b.residual));
        }
    }
    for (const auto* data : {&mixed, &m1}) {
        const auto rep = abece(*data, 20, 1000, seed, 1);
        const auto jd = joint_density(*data, 20, 1000, 20, seed, 3);
        const Eigen::VectorXd marginal = jd.accuracy_marginal();
        for (std::size_t j = 0; j < rep.bins.size(); ++j) {
            if (marginal(static_cast<Index>(j)) != rep.bins[j].mass) {
                fail(o, fmt("density marginal %.17g vs ABECE mass %.17g at a=%.2f",
                            marginal(static_cast<Index>(j)), rep.bins[j].mass, rep.bins[j].a));
            }
        }
    }
    if (o.pass) {
        o.detail = "identical across 1-8 threads; m1 bins exact; density marginal == masses";
    }
    return o;
}

Outcome criterion7()
{
    Outcome o;
    const auto before = generate_impulse(ImpulseSpec{{{1.0, 0.8, 0.6}}, 10, 1000, 7}, "item");
    const auto after = generate_impulse(ImpulseSpec{{{1.0, 0.6, 0.6}}, 10, 1000, 7}, "item");
    const auto g = calibration_gain(before, after, UniformCost{4.0}, ThresholdRule::theoretical);
    if (std::abs(g.gain - 1.0) > 1e-9 || std::abs(g.value_before + 1.0) > 1e-9
        || std::abs(g.value_after) > 1e-9) {
        fail(o, fmt("G=%.12f (%.12f -> %.12f)", g.gain, g.value_before, g.value_after));
    }
    if (!g.argmax_equal) {
        fail(o, "argmax differs");
    }
    if (o.pass) {
        o.detail = fmt("G=%.3f (%.3f -> %.3f), argmax_equal", g.gain, g.value_before,
                       g.value_after);
    }
    return o;
}

Outcome criterion8()
{
    Outcome o;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::uniform_real_distribution<double> s(-5.0, 5.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int classes = 2 + trial % 4;
        const auto out = st::random_outcome(rng, classes);
        const auto bin = st::random_outcome(rng, 2);
        Eigen::MatrixXd v_w(classes, classes);
        for (Index i = 0; i < v_w.size(); ++i) {
            v_w(i) = s(rng);
        }
        v_w.diagonal().setZero();
        const std::vector<std::pair<SelectiveOutcome, CostSpec>> cases{
            {out, UniformCost{u(rng)}},
            {bin, BinaryAsymmetricCost{u(rng), u(rng), trial % 2}},
            {out, FullCost{s(rng), s(rng), v_w}},
        };
        for (const auto& [outcome, spec] : cases) {
            const double err = std::abs(value_of(outcome, spec) - st::mean_payoff(outcome, spec));
            worst = std::max(worst, err);
            if (err > 1e-12) {
                fail(o, fmt("trial %.0f variant %.0f: |diff| = %.3g", trial,
                            static_cast<double>(spec.index()), err));
            }
        }
    }
    if (o.pass) {
        o.detail = fmt("300 cases, max |value_of - mean payoff| = %.1e", worst);
    }
    return o;
}

struct Criterion {
    std::function<Outcome()> run;
    double budget_seconds;
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks"};
    int only = 0;
    app.add_option("--criterion", only, "Run a single criterion (1-8)")
        ->check(CLI::Range(1, 8));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {criterion1, 1.0},  {criterion2, 1.0}, {criterion3, 10.0}, {criterion4, 10.0},
        {criterion5, 30.0}, {criterion6, 5.0}, {criterion7, 1.0},  {criterion8, 1.0},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<std::size_t>(only) != i + 1) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > criteria[i].budget_seconds) {
            fail(o, fmt("took %.2f s, budget %.0f s", secs, criteria[i].budget_seconds));
        }
        std::printf("criterion %zu: %s  %s  [%.2f s / %.0f s]\n", i + 1, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs, criteria[i].budget_seconds);
        failures += o.pass ? 0 : 1;
    }
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}
