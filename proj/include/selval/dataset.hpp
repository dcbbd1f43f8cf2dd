#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "selval/error.hpp"

namespace selval {

using Index = Eigen::Index;

enum class ScoreKind { probabilities, logits };

ScoreKind parse_score_kind(const std::string& text);
const char* to_string(ScoreKind kind);

// Simplex tolerance for probability-form input rows.
inline constexpr double kSimplexTolerance = 1e-6;
// Floor applied to probabilities before any logarithm.
inline constexpr double kProbabilityFloor = 1e-12;

struct PredictionRecord {
    std::string id;
    Eigen::VectorXd scores;  // probability form
    int true_label = 0;
    int predicted_label = 0;
    double confidence = 0.0;

    bool correct() const { return predicted_label == true_label; }
};

/// Lowest-index argmax of a score row.
template <typename Derived>
int argmax_lowest(const Eigen::DenseBase<Derived>& row)
{
    Index best = 0;
    for (Index j = 1; j < row.size(); ++j) {
        if (row(j) > row(best)) {
            best = j;
        }
    }
    return static_cast<int>(best);
}

/// Row-wise normalized exponential with max subtraction.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
softmax_rows(const Eigen::MatrixBase<Derived>& logits)
{
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Matrix out = logits.colwise() - logits.rowwise().maxCoeff();
    out = out.array().exp().matrix();
    out.array().colwise() /= out.array().rowwise().sum();
    return out;
}

/// Log of probabilities floored at kProbabilityFloor.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
safe_log(const Eigen::MatrixBase<Derived>& probs)
{
    using Scalar = typename Derived::Scalar;
    return probs.array().max(Scalar(kProbabilityFloor)).log().matrix();
}

// Validated, immutable set of prediction records. Scores are stored in
// probability form, one row per item.
class LabeledDataset {
public:
    LabeledDataset() = default;

    // Validates rows against the simplex (renormalizing rows that are off by
    // less than kSimplexTolerance) and derives predictions by argmax.
    static LabeledDataset from_probabilities(std::string name, std::vector<std::string> ids,
                                             Eigen::MatrixXd probabilities,
                                             Eigen::VectorXi labels);

    static LabeledDataset from_logits(std::string name, std::vector<std::string> ids,
                                      const Eigen::MatrixXd& logits, Eigen::VectorXi labels);

    // Replaces the score matrix while keeping ids, labels and predicted labels.
    // Used by argmax-preserving maps such as temperature scaling.
    LabeledDataset with_rescored(Eigen::MatrixXd probabilities) const;

    const std::string& name() const { return name_; }
    ScoreKind source_kind() const { return kind_; }
    Index size() const { return static_cast<Index>(ids_.size()); }
    bool empty() const { return ids_.empty(); }
    int num_classes() const { return num_classes_; }

    const std::vector<std::string>& ids() const { return ids_; }
    const Eigen::MatrixXd& probabilities() const { return probs_; }
    const Eigen::VectorXi& labels() const { return labels_; }
    const Eigen::VectorXi& predicted() const { return predicted_; }
    const Eigen::VectorXd& confidence() const { return confidence_; }

    bool correct(Index i) const { return predicted_(i) == labels_(i); }
    double accuracy() const;
    PredictionRecord record(Index i) const;

    LabeledDataset renamed(std::string name) const;

private:
    void derive_predictions();

    std::string name_;
    ScoreKind kind_ = ScoreKind::probabilities;
    int num_classes_ = 0;
    std::vector<std::string> ids_;
    Eigen::MatrixXd probs_;
    Eigen::VectorXi labels_;
    Eigen::VectorXi predicted_;
    Eigen::VectorXd confidence_;
};

// Loads JSONL (default) or CSV (".csv" extension). A path of "-" reads JSONL
// from standard input.
LabeledDataset load_dataset(const std::string& path, ScoreKind kind,
                            std::optional<int> num_classes = std::nullopt);

LabeledDataset parse_jsonl(std::istream& in, const std::string& name, ScoreKind kind,
                           std::optional<int> num_classes = std::nullopt);
LabeledDataset parse_csv(std::istream& in, const std::string& name, ScoreKind kind,
                         std::optional<int> num_classes = std::nullopt);

// Writes probability-form JSONL, 17 significant digits per score.
void write_jsonl(std::ostream& out, const LabeledDataset& data);
void save_dataset(const std::string& path, const LabeledDataset& data);

struct SplitDiagnostics {
    std::size_t overlap = 0;
    bool class_mismatch = false;
};

SplitDiagnostics split_check(const LabeledDataset& tune, const LabeledDataset& test);

} // namespace selval
