#include "selval/cost.hpp"

#include "overloaded.hpp"

#include <cmath>
#include <string>

namespace selval {

namespace {

using detail::overloaded;

void require_finite_nonnegative(double x, const char* what)
{
    if (!std::isfinite(x) || x < 0.0) {
        throw ValidationError(std::string(what) + " must be finite and >= 0");
    }
}

} // namespace

double SelectiveOutcome::rho() const
{
    return total == 0 ? 0.0 : static_cast<double>(rejected) / static_cast<double>(total);
}

double SelectiveOutcome::alpha() const
{
    if (rejected_all()) {
        return 0.0;
    }
    return static_cast<double>(confusion.trace()) / static_cast<double>(accepted());
}

SelectiveOutcome SelectiveOutcome::empty(std::int64_t total, int num_classes)
{
    SelectiveOutcome out;
    out.total = total;
    out.rejected = total;
    out.confusion = CountMatrix::Zero(num_classes, num_classes);
    return out;
}

void validate_cost(const CostSpec& spec, int num_classes)
{
    std::visit(overloaded{
                   [](const UniformCost& u) { require_finite_nonnegative(u.k, "k"); },
                   [&](const BinaryAsymmetricCost& b) {
                       require_finite_nonnegative(b.k_fp, "k_fp");
                       require_finite_nonnegative(b.k_fn, "k_fn");
                       if (b.positive_class != 0 && b.positive_class != 1) {
                           throw ValidationError("positive_class must be 0 or 1");
                       }
                       if (num_classes > 0 && num_classes != 2) {
                           throw ValidationError("binary cost spec requires exactly 2 classes, got "
                                                 + std::to_string(num_classes));
                       }
                   },
                   [&](const FullCost& f) {
                       if (!std::isfinite(f.v_r) || !std::isfinite(f.v_c) || !f.v_w.allFinite()) {
                           throw ValidationError("full cost spec has non-finite entries");
                       }
                       if (f.v_w.rows() != f.v_w.cols() || f.v_w.rows() == 0) {
                           throw ValidationError("v_w must be a non-empty square matrix");
                       }
                       if ((f.v_w.diagonal().array() != 0.0).any()) {
                           throw ValidationError("v_w diagonal must be exactly zero");
                       }
                       if (num_classes > 0 && f.v_w.rows() != num_classes) {
                           throw ValidationError("v_w is " + std::to_string(f.v_w.rows()) + "x"
                                                 + std::to_string(f.v_w.rows()) + " but data has "
                                                 + std::to_string(num_classes) + " classes");
                       }
                   }},
               spec);
}

FullCost to_full(const CostSpec& spec, int num_classes)
{
    validate_cost(spec, num_classes);
    return std::visit(overloaded{[&](const UniformCost& u) {
                                     FullCost f;
                                     f.v_w = Eigen::MatrixXd::Constant(num_classes, num_classes,
                                                                       -u.k);
                                     f.v_w.diagonal().setZero();
                                     return f;
                                 },
                                 [](const BinaryAsymmetricCost& b) {
                                     FullCost f;
                                     const int pos = b.positive_class;
                                     const int neg = 1 - pos;
                                     f.v_w = Eigen::MatrixXd::Zero(2, 2);
                                     f.v_w(neg, pos) = -b.k_fp;
                                     f.v_w(pos, neg) = -b.k_fn;
                                     return f;
                                 },
                                 [](const FullCost& f) { return f; }},
                      spec);
}

double value_of(const SelectiveOutcome& outcome, const CostSpec& spec)
{
    if (outcome.total <= 0) {
        throw ValidationError("value of an empty outcome");
    }
    validate_cost(spec, outcome.num_classes());
    return std::visit(
        overloaded{
            [&](const UniformCost& u) {
                // (1 - rho)(alpha - k(1 - alpha)) with the fractions cleared, so
                // equal counts give bit-identical values in threshold sweeps.
                const auto correct = outcome.confusion.trace();
                const auto wrong = outcome.accepted() - correct;
                return (static_cast<double>(correct) - u.k * static_cast<double>(wrong))
                       / static_cast<double>(outcome.total);
            },
            [&](const BinaryAsymmetricCost& b) {
                const int pos = b.positive_class;
                const int neg = 1 - pos;
                const auto& c = outcome.confusion;
                const double tp = static_cast<double>(c(pos, pos));
                const double tn = static_cast<double>(c(neg, neg));
                const double fp = static_cast<double>(c(neg, pos));
                const double fn = static_cast<double>(c(pos, neg));
                return (tp + tn - b.k_fp * fp - b.k_fn * fn) / static_cast<double>(outcome.total);
            },
            [&](const FullCost& f) {
                // rho V_r + (1 - rho)(alpha V_c + sum(Omega .* V_w)), Omega taken
                // over accepted items; the (1 - rho) factor cancels that normalizer.
                const Eigen::MatrixXd counts = outcome.confusion.cast<double>();
                const double accepted = counts.trace() * f.v_c + counts.cwiseProduct(f.v_w).sum();
                return (static_cast<double>(outcome.rejected) * f.v_r + accepted)
                       / static_cast<double>(outcome.total);
            }},
        spec);
}

SelectiveOutcome outcome_of(const LabeledDataset& data, const ThresholdPolicy& policy)
{
    validate_policy(policy, data.num_classes());
    auto out = SelectiveOutcome::empty(data.size(), data.num_classes());
    for (Index i = 0; i < data.size(); ++i) {
        const int pred = data.predicted()(i);
        if (apply_policy(policy, pred, data.confidence()(i)) == Decision::accept) {
            ++out.confusion(data.labels()(i), pred);
            --out.rejected;
        }
    }
    return out;
}

ValuePoint value_at(const LabeledDataset& data, const CostSpec& spec,
                    const ThresholdPolicy& policy)
{
    if (data.empty()) {
        throw ValidationError("value of an empty dataset");
    }
    const auto outcome = outcome_of(data, policy);
    return ValuePoint{spec, policy, outcome.rho(), outcome.alpha(), value_of(outcome, spec)};
}

} // namespace selval
