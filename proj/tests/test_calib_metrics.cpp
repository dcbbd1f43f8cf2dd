#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "selval/calib_metrics.hpp"
#include "selval/serialize.hpp"
#include "selval/synthetic.hpp"

using namespace selval;
using selval::testing::add_block;
using selval::testing::make_dataset;

namespace {

// Hypergeometric pmf: j successes in n draws from `good` of `total`.
double hypergeometric(int j, int n, int good, int total)
{
    auto lchoose = [](int a, int b) {
        return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
    };
    if (j > good || n - j > total - good) {
        return 0.0;
    }
    return std::exp(lchoose(good, j) + lchoose(total - good, n - j) - lchoose(total, n));
}

} // namespace

TEST_CASE("ECE of a two-block dataset")
{
    std::vector<testing::Item> items;
    add_block(items, 50, 0.9, 50, 3);
    add_block(items, 50, 0.6, 10, 3, 2);
    const auto d = make_dataset(items, 3);
    const auto r = ece(d, 10);
    CHECK(r.num_bins == 10);
    REQUIRE(r.bins.size() == 10);
    CHECK(r.ece == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.bins[8].count == 50);
    CHECK(r.bins[8].accuracy == 1.0);
    CHECK(r.bins[8].mean_confidence == 0.9);
    CHECK(r.bins[5].count == 50);
    CHECK(r.bins[5].accuracy == doctest::Approx(0.2));
    CHECK(r.bins[5].lo == doctest::Approx(0.5));
    CHECK(r.bins[5].hi == doctest::Approx(0.6));
    CHECK(r.bins[0].count == 0);
}

TEST_CASE("ECE matches a direct computation on random data")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto d = testing::random_grid_dataset(seed, 500, 4);
        const int bins = 5 + static_cast<int>(seed);
        std::vector<double> conf_sum(bins, 0.0);
        std::vector<double> right(bins, 0.0);
        std::vector<double> count(bins, 0.0);
        for (Index i = 0; i < d.size(); ++i) {
            const double c = d.confidence()(i);
            // Bins are (lo, hi]; search for the bin instead of computing it.
            int b = 0;
            while (b < bins - 1 && c > static_cast<double>(b + 1) / bins) {
                ++b;
            }
            conf_sum[b] += c;
            right[b] += d.correct(i) ? 1.0 : 0.0;
            count[b] += 1.0;
        }
        double expected = 0.0;
        for (int b = 0; b < bins; ++b) {
            if (count[b] > 0) {
                expected += count[b] / d.size() * std::abs(right[b] / count[b]
                                                            - conf_sum[b] / count[b]);
            }
        }
        CHECK(ece(d, bins).ece == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("ECE rejects bad bin counts")
{
    const auto d = make_dataset({{0, 0.6, 0}}, 2);
    CHECK_THROWS_AS(ece(d, 0), ValidationError);
}

TEST_CASE("ABECE on m1 has exact means and residuals")
{
    const auto m1 = generate_impulse(impulse_preset("m1"), "m1");
    const auto r = abece(m1, 20, 1000, 9);
    REQUIRE(r.bins.size() == 21);
    std::int64_t total = 0;
    for (std::size_t j = 0; j < r.bins.size(); ++j) {
        const auto& b = r.bins[j];
        CHECK(b.a == static_cast<double>(j) / 20);
        total += b.count;
        if (b.count > 0) {
            CHECK(b.mean_confidence == 0.6);
            CHECK(b.residual == 0.6 - b.a);
        }
    }
    CHECK(total == 1000);
}

TEST_CASE("ABECE masses follow the hypergeometric law")
{
    // 600 of 1000 correct, samples of 20 without replacement.
    const auto m1 = generate_impulse(impulse_preset("m1"), "m1");
    const auto r = abece(m1, 20, 40000, 3);
    for (int j = 0; j <= 20; ++j) {
        CHECK(std::abs(r.bins[j].mass - hypergeometric(j, 20, 600, 1000)) < 0.01);
    }
}

TEST_CASE("ABECE aggregates")
{
    // Two-point dataset, n=2: each sample is both items, so one bin.
    const auto d = make_dataset({{0, 0.8, 0}, {0, 0.6, 1}}, 2);
    const auto r = abece(d, 2, 10, 1);
    CHECK(r.bins[1].count == 10);
    CHECK(r.bins[1].mean_confidence == doctest::Approx(0.7));
    CHECK(r.abece_sum == doctest::Approx(0.2));
    CHECK(r.abece_weighted == doctest::Approx(0.2));

    CHECK_THROWS_AS(abece(d, 3, 10, 1), ValidationError);
    CHECK_THROWS_AS(abece(d, 0, 10, 1), ValidationError);
    CHECK_THROWS_AS(abece(d, 1, 0, 1), ValidationError);
}

TEST_CASE("samples are drawn without replacement")
{
    // With n equal to the dataset size every sample covers every item.
    std::vector<testing::Item> items;
    add_block(items, 7, 0.5, 3, 2);
    const auto d = make_dataset(items, 2);
    for (const auto& s : draw_samples(d, 7, 50, 4)) {
        CHECK(s.correct == 3);
        CHECK(s.mean_confidence == 0.5);
    }
}

TEST_CASE("ABECE output is identical across thread counts and runs")
{
    const auto d = generate_calibrated(3000, 5, 0.8, 21);
    const std::string ref = to_json(abece(d, 20, 1000, 77, 1)).dump();
    for (int threads : {1, 2, 3, 8}) {
        CHECK(to_json(abece(d, 20, 1000, 77, threads)).dump() == ref);
    }
    CHECK(to_json(abece(d, 20, 1000, 78, 1)).dump() != ref);
}

TEST_CASE("joint density marginals")
{
    const auto d = generate_calibrated(2000, 3, 1.0, 8);
    const auto jd = joint_density(d, 20, 1000, 20, 5, 2);
    const auto r = abece(d, 20, 1000, 5, 3);
    CHECK(jd.mass.rows() == 21);
    CHECK(jd.mass.cols() == 20);
    CHECK(jd.counts.sum() == 1000);
    CHECK(jd.mass.sum() == doctest::Approx(1.0));
    const Eigen::VectorXd marginal = jd.accuracy_marginal();
    for (int j = 0; j <= 20; ++j) {
        CHECK(marginal(j) == r.bins[j].mass);
    }
    CHECK(jd.confidence_marginal().sum() == doctest::Approx(1.0));
    CHECK(jd.confidence_edges(0) == 0.0);
    CHECK(jd.confidence_edges(20) == 1.0);

    // On m1 all sample means are 0.6, so one confidence column holds everything.
    const auto m1 = generate_impulse(impulse_preset("m1"), "m1");
    const auto jm = joint_density(m1, 20, 500, 20, 1);
    const Eigen::RowVectorXd cm = jm.confidence_marginal();
    CHECK(cm(confidence_bin(0.6, 20)) == 1.0);
}

TEST_CASE("calibration gain worked case")
{
    ImpulseSpec before_spec{{{1.0, 0.8, 0.6}}, 10, 1000, 17};
    ImpulseSpec after_spec{{{1.0, 0.6, 0.6}}, 10, 1000, 17};
    const auto before = generate_impulse(before_spec, "x");
    const auto after = generate_impulse(after_spec, "x");
    const auto g = calibration_gain(before, after, UniformCost{4.0}, ThresholdRule::theoretical);
    CHECK(g.value_before == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(g.value_after == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.gain == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.argmax_equal);

    // Self-tuned empirical thresholds can always retreat to rejecting all.
    const auto e = calibration_gain(before, after, UniformCost{4.0}, ThresholdRule::empirical);
    CHECK(e.value_before == 0.0);
    CHECK(e.value_after == 0.0);
}

TEST_CASE("calibration gain validation")
{
    const auto a = make_dataset({{0, 0.7, 0}, {1, 0.6, 1}}, 2, "a");
    const auto b = make_dataset({{0, 0.7, 0}, {1, 0.6, 1}}, 2, "b");
    CHECK_THROWS_AS(calibration_gain(a, b, UniformCost{1}, ThresholdRule::theoretical),
                    ValidationError);

    const auto relabeled = make_dataset({{0, 0.7, 1}, {1, 0.6, 1}}, 2, "a");
    CHECK_THROWS_AS(calibration_gain(a, relabeled, UniformCost{1}, ThresholdRule::theoretical),
                    ValidationError);

    const auto flipped = make_dataset({{1, 0.7, 0}, {1, 0.6, 1}}, 2, "a");
    const auto g = calibration_gain(a, flipped, UniformCost{1}, ThresholdRule::theoretical);
    CHECK_FALSE(g.argmax_equal);
    CHECK(g.argmax_differences == 1);

    CHECK(parse_threshold_rule("empirical") == ThresholdRule::empirical);
    CHECK_THROWS_AS(parse_threshold_rule("best"), ValidationError);
}
