#include "selval/calib_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <unordered_map>

#include "selval/rng.hpp"
#include "selval/selective.hpp"

namespace selval {

namespace {

// Running mean; exact when every observation is identical.
struct RunningMean {
    double mean = 0.0;
    std::int64_t count = 0;

    void add(double x)
    {
        ++count;
        mean += (x - mean) / static_cast<double>(count);
    }
};

void check_sampling(const LabeledDataset& data, int n, int num_samples)
{
    if (data.empty()) {
        throw ValidationError("sampling from an empty dataset");
    }
    if (n < 1) {
        throw ValidationError("sample size n must be >= 1");
    }
    if (num_samples < 1) {
        throw ValidationError("number of samples N must be >= 1");
    }
    if (n > data.size()) {
        throw ValidationError("sample size n=" + std::to_string(n) + " exceeds dataset size "
                              + std::to_string(data.size()));
    }
}

void draw_range(const LabeledDataset& data, int n, std::uint64_t seed, int first, int last,
                std::vector<SampleStats>& out)
{
    const auto m = static_cast<std::int64_t>(data.size());
    std::vector<char> taken(static_cast<std::size_t>(m), 0);
    std::vector<std::int64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(n));
    for (int j = first; j < last; ++j) {
        auto rng = stream_rng(seed, static_cast<std::uint64_t>(j));
        chosen.clear();
        // Floyd's algorithm: n distinct indices in O(n) draws.
        for (std::int64_t t = m - n; t < m; ++t) {
            std::uniform_int_distribution<std::int64_t> pick(0, t);
            std::int64_t r = pick(rng);
            if (taken[static_cast<std::size_t>(r)]) {
                r = t;
            }
            taken[static_cast<std::size_t>(r)] = 1;
            chosen.push_back(r);
        }
        SampleStats stats;
        RunningMean conf;
        for (auto i : chosen) {
            taken[static_cast<std::size_t>(i)] = 0;
            stats.correct += data.correct(i) ? 1 : 0;
            conf.add(data.confidence()(i));
        }
        stats.mean_confidence = conf.mean;
        out[static_cast<std::size_t>(j)] = stats;
    }
}

} // namespace

EceReport ece(const LabeledDataset& data, int num_bins)
{
    if (data.empty()) {
        throw ValidationError("ECE of an empty dataset");
    }
    if (num_bins < 1) {
        throw ValidationError("ECE needs at least one bin");
    }
    std::vector<RunningMean> conf(static_cast<std::size_t>(num_bins));
    std::vector<std::int64_t> hits(static_cast<std::size_t>(num_bins), 0);
    for (Index i = 0; i < data.size(); ++i) {
        const auto b = static_cast<std::size_t>(confidence_bin(data.confidence()(i), num_bins));
        conf[b].add(data.confidence()(i));
        hits[b] += data.correct(i) ? 1 : 0;
    }
    EceReport report;
    report.num_bins = num_bins;
    const auto total = static_cast<double>(data.size());
    for (int b = 0; b < num_bins; ++b) {
        const auto& m = conf[static_cast<std::size_t>(b)];
        EceBin bin;
        bin.lo = static_cast<double>(b) / num_bins;
        bin.hi = static_cast<double>(b + 1) / num_bins;
        bin.count = m.count;
        bin.mass = static_cast<double>(m.count) / total;
        if (m.count > 0) {
            bin.mean_confidence = m.mean;
            bin.accuracy =
                static_cast<double>(hits[static_cast<std::size_t>(b)]) / static_cast<double>(m.count);
            report.ece += bin.mass * std::abs(bin.accuracy - bin.mean_confidence);
        }
        report.bins.push_back(bin);
    }
    return report;
}

int confidence_bin(double confidence, int num_bins)
{
    const int b = static_cast<int>(std::ceil(confidence * num_bins)) - 1;
    return std::clamp(b, 0, num_bins - 1);
}

std::vector<SampleStats> draw_samples(const LabeledDataset& data, int n, int num_samples,
                                      std::uint64_t seed, int threads)
{
    check_sampling(data, n, num_samples);
    std::vector<SampleStats> out(static_cast<std::size_t>(num_samples));
    if (threads <= 0) {
        threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    }
    threads = std::min(threads, num_samples);
    if (threads == 1) {
        draw_range(data, n, seed, 0, num_samples, out);
        return out;
    }
    std::vector<std::thread> pool;
    const int chunk = (num_samples + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int first = t * chunk;
        const int last = std::min(num_samples, first + chunk);
        if (first >= last) {
            break;
        }
        pool.emplace_back(draw_range, std::cref(data), n, seed, first, last, std::ref(out));
    }
    for (auto& th : pool) {
        th.join();
    }
    return out;
}

AbeceReport abece(const LabeledDataset& data, int n, int num_samples, std::uint64_t seed,
                  int threads)
{
    const auto samples = draw_samples(data, n, num_samples, seed, threads);
    std::vector<RunningMean> conf(static_cast<std::size_t>(n) + 1);
    for (const auto& s : samples) {
        conf[static_cast<std::size_t>(s.correct)].add(s.mean_confidence);
    }
    AbeceReport report;
    report.sample_size = n;
    report.num_samples = num_samples;
    report.seed = seed;
    for (int j = 0; j <= n; ++j) {
        const auto& m = conf[static_cast<std::size_t>(j)];
        AbeceBin bin;
        bin.a = static_cast<double>(j) / n;
        bin.count = m.count;
        bin.mass = static_cast<double>(m.count) / num_samples;
        if (m.count > 0) {
            bin.mean_confidence = m.mean;
            bin.residual = m.mean - bin.a;
            report.abece_sum += std::abs(bin.residual);
            report.abece_weighted += bin.mass * std::abs(bin.residual);
        }
        report.bins.push_back(bin);
    }
    return report;
}

JointDensity joint_density(const LabeledDataset& data, int n, int num_samples, int conf_bins,
                           std::uint64_t seed, int threads)
{
    if (conf_bins < 1) {
        throw ValidationError("joint density needs at least one confidence bin");
    }
    const auto samples = draw_samples(data, n, num_samples, seed, threads);
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts =
        Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n + 1, conf_bins);
    for (const auto& s : samples) {
        ++counts(s.correct, confidence_bin(s.mean_confidence, conf_bins));
    }
    JointDensity out;
    out.sample_size = n;
    out.num_samples = num_samples;
    out.seed = seed;
    out.accuracy_levels.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
        out.accuracy_levels(j) = static_cast<double>(j) / n;
    }
    out.confidence_edges.resize(conf_bins + 1);
    for (int b = 0; b <= conf_bins; ++b) {
        out.confidence_edges(b) = static_cast<double>(b) / conf_bins;
    }
    out.counts = counts;
    out.mass = counts.cast<double>() / static_cast<double>(num_samples);
    return out;
}

ThresholdRule parse_threshold_rule(const std::string& text)
{
    if (text == "theoretical") {
        return ThresholdRule::theoretical;
    }
    if (text == "empirical") {
        return ThresholdRule::empirical;
    }
    throw ValidationError("unknown threshold rule '" + text + "' (expected theoretical|empirical)");
}

CalibrationGain calibration_gain(const LabeledDataset& before, const LabeledDataset& after,
                                 const CostSpec& spec, ThresholdRule rule,
                                 std::optional<GainTuning> tuning)
{
    if (before.empty() || after.empty()) {
        throw ValidationError("calibration gain needs non-empty datasets");
    }
    if (before.size() != after.size() || before.num_classes() != after.num_classes()) {
        throw ValidationError("before/after datasets differ in size or class count");
    }
    std::unordered_map<std::string, Index> index_of;
    index_of.reserve(static_cast<std::size_t>(after.size()));
    for (Index i = 0; i < after.size(); ++i) {
        index_of.emplace(after.ids()[static_cast<std::size_t>(i)], i);
    }
    CalibrationGain gain;
    gain.spec = spec;
    for (Index i = 0; i < before.size(); ++i) {
        const auto& id = before.ids()[static_cast<std::size_t>(i)];
        const auto it = index_of.find(id);
        if (it == index_of.end()) {
            throw ValidationError("id '" + id + "' missing from the calibrated dataset");
        }
        if (after.labels()(it->second) != before.labels()(i)) {
            throw ValidationError("id '" + id + "' has different true labels");
        }
        if (after.predicted()(it->second) != before.predicted()(i)) {
            ++gain.argmax_differences;
        }
    }
    gain.argmax_equal = gain.argmax_differences == 0;

    auto value = [&](const LabeledDataset& data, const LabeledDataset& tune) {
        const ThresholdPolicy policy = rule == ThresholdRule::theoretical
                                           ? theoretical_threshold(spec)
                                           : empirical_threshold(tune, spec).policy;
        return value_at(data, spec, policy).value;
    };
    gain.value_before = value(before, tuning ? tuning->before : before);
    gain.value_after = value(after, tuning ? tuning->after : after);
    gain.gain = gain.value_after - gain.value_before;
    return gain;
}

} // namespace selval
