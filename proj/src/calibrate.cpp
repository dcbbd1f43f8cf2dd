#include "selval/calibrate.hpp"

#include <array>
#include <cmath>

namespace selval {

namespace {

constexpr double kLogTolerance = 1e-4;
constexpr double kFlatTolerance = 1e-12;

class NllObjective {
public:
    explicit NllObjective(const LabeledDataset& data)
        : logp_(safe_log(data.probabilities())), labels_(data.labels())
    {
    }

    double operator()(double temperature) const
    {
        double total = 0.0;
        for (Index i = 0; i < logp_.rows(); ++i) {
            const auto z = logp_.row(i) / temperature;
            const double m = z.maxCoeff();
            const double lse = m + std::log((z.array() - m).exp().sum());
            total += lse - z(labels_(i));
        }
        return total / static_cast<double>(logp_.rows());
    }

private:
    Eigen::MatrixXd logp_;
    Eigen::VectorXi labels_;
};

} // namespace

const char* to_string(FitStatus status)
{
    switch (status) {
    case FitStatus::ok:
        return "ok";
    case FitStatus::flat:
        return "flat";
    case FitStatus::at_lower_bound:
        return "at_lower_bound";
    case FitStatus::at_upper_bound:
        return "at_upper_bound";
    }
    return "unknown";
}

double tempered_nll(const LabeledDataset& data, double temperature)
{
    if (data.empty()) {
        throw ValidationError("NLL of an empty dataset");
    }
    if (!(temperature > 0.0)) {
        throw ValidationError("temperature must be > 0");
    }
    return NllObjective(data)(temperature);
}

TemperatureScaler fit_temperature(const LabeledDataset& tune)
{
    if (tune.empty()) {
        throw ValidationError("temperature fit needs a non-empty tune set");
    }
    const NllObjective nll(tune);
    auto f = [&](double log_t) { return nll(std::exp(log_t)); };

    const double lo = std::log(kMinTemperature);
    const double hi = std::log(kMaxTemperature);
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    const double f_one = f(0.0);

    TemperatureScaler scaler;
    if (std::abs(f_lo - f_one) <= kFlatTolerance && std::abs(f_hi - f_one) <= kFlatTolerance) {
        scaler.temperature = 1.0;
        scaler.fit_nll = f_one;
        scaler.status = FitStatus::flat;
        return scaler;
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    std::size_t iterations = 0;
    while (b - a > kLogTolerance) {
        ++iterations;
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double mid = 0.5 * (a + b);

    // Boundary and identity checks; the first of equal minima wins, so a
    // saturated objective reports the bound itself.
    const std::array<std::pair<double, double>, 4> candidates{
        {{lo, f_lo}, {hi, f_hi}, {mid, f(mid)}, {0.0, f_one}}};
    auto best = candidates[0];
    for (const auto& cand : candidates) {
        if (cand.second < best.second) {
            best = cand;
        }
    }
    scaler.temperature = std::exp(best.first);
    scaler.fit_nll = best.second;
    scaler.fit_iterations = iterations;
    if (best.first - lo <= kLogTolerance) {
        scaler.temperature = kMinTemperature;
        scaler.status = FitStatus::at_lower_bound;
    } else if (hi - best.first <= kLogTolerance) {
        scaler.temperature = kMaxTemperature;
        scaler.status = FitStatus::at_upper_bound;
    }
    return scaler;
}

LabeledDataset apply_temperature(const TemperatureScaler& scaler, const LabeledDataset& data)
{
    if (!(scaler.temperature > 0.0) || !std::isfinite(scaler.temperature)) {
        throw ValidationError("temperature must be finite and > 0");
    }
    return data.with_rescored(temper(data.probabilities(), scaler.temperature));
}

} // namespace selval
