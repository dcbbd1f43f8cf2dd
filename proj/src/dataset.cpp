#include "selval/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace selval {

namespace {

// Per-row validation failure; parsers rethrow it with the source line.
class RecordError : public ValidationError {
public:
    RecordError(Index row, const std::string& what) : ValidationError(what), row_(row) {}
    Index row() const { return row_; }

private:
    Index row_;
};

std::string line_prefix(const std::string& name, std::size_t line)
{
    return name + ":" + std::to_string(line) + ": ";
}

double parse_double(std::string_view text, const std::string& where)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ValidationError(where + "not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

struct RawRows {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> scores;
    std::vector<int> labels;
    std::vector<std::size_t> lines;
};

LabeledDataset assemble(RawRows rows, const std::string& name, const std::string& source,
                        ScoreKind kind, std::optional<int> num_classes)
{
    if (rows.ids.empty()) {
        throw ValidationError(source + ": empty dataset");
    }
    if (num_classes && *num_classes <= 0) {
        throw ValidationError(source + ": num_classes must be positive");
    }
    const int k = num_classes.value_or(static_cast<int>(rows.scores.front().size()));
    const auto n = static_cast<Index>(rows.ids.size());
    Eigen::MatrixXd scores(n, k);
    Eigen::VectorXi labels(n);
    for (Index i = 0; i < n; ++i) {
        const auto& row = rows.scores[static_cast<std::size_t>(i)];
        const auto where = line_prefix(source, rows.lines[static_cast<std::size_t>(i)]);
        if (static_cast<int>(row.size()) != k) {
            throw ValidationError(where + "ragged score vector (expected " + std::to_string(k)
                                  + " scores, got " + std::to_string(row.size()) + ")");
        }
        const int label = rows.labels[static_cast<std::size_t>(i)];
        if (label < 0 || label >= k) {
            throw ValidationError(where + "label " + std::to_string(label) + " out of range [0,"
                                  + std::to_string(k) + ")");
        }
        for (int j = 0; j < k; ++j) {
            scores(i, j) = row[static_cast<std::size_t>(j)];
        }
        labels(i) = label;
    }
    try {
        if (kind == ScoreKind::logits) {
            return LabeledDataset::from_logits(name, std::move(rows.ids), scores, labels);
        }
        return LabeledDataset::from_probabilities(name, std::move(rows.ids), std::move(scores),
                                                  labels);
    } catch (const RecordError& e) {
        throw ValidationError(line_prefix(source, rows.lines[static_cast<std::size_t>(e.row())])
                              + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(source + ": " + e.what());
    }
}

} // namespace

ScoreKind parse_score_kind(const std::string& text)
{
    if (text == "probabilities" || text == "probs") {
        return ScoreKind::probabilities;
    }
    if (text == "logits") {
        return ScoreKind::logits;
    }
    throw ValidationError("unknown score kind '" + text + "' (expected probabilities|logits)");
}

const char* to_string(ScoreKind kind)
{
    return kind == ScoreKind::logits ? "logits" : "probabilities";
}

LabeledDataset LabeledDataset::from_probabilities(std::string name, std::vector<std::string> ids,
                                                  Eigen::MatrixXd probabilities,
                                                  Eigen::VectorXi labels)
{
    const Index n = probabilities.rows();
    if (n == 0) {
        throw ValidationError("empty dataset");
    }
    if (static_cast<Index>(ids.size()) != n || labels.size() != n) {
        throw ValidationError("ids, scores and labels disagree in length");
    }
    if (probabilities.cols() < 1) {
        throw ValidationError("num_classes must be positive");
    }
    std::unordered_set<std::string> seen;
    seen.reserve(ids.size());
    for (Index i = 0; i < n; ++i) {
        const auto& id = ids[static_cast<std::size_t>(i)];
        if (!seen.insert(id).second) {
            throw RecordError(i, "duplicate id '" + id + "'");
        }
        if (labels(i) < 0 || labels(i) >= probabilities.cols()) {
            throw RecordError(i, "record '" + id + "': label out of range");
        }
        auto row = probabilities.row(i);
        for (Index j = 0; j < row.size(); ++j) {
            if (!std::isfinite(row(j)) || row(j) < 0.0 || row(j) > 1.0) {
                throw RecordError(i, "record '" + id + "': probability outside [0,1]");
            }
        }
        const double sum = row.sum();
        if (std::abs(sum - 1.0) > kSimplexTolerance) {
            std::ostringstream msg;
            msg << "record '" << id << "': probabilities sum to " << sum
                << ", not 1 (simplex violation)";
            throw RecordError(i, msg.str());
        }
        // Rows that already sum to 1 up to rounding are left bit-for-bit intact.
        if (std::abs(sum - 1.0) > 1e-12) {
            row /= sum;
        }
    }
    LabeledDataset out;
    out.name_ = std::move(name);
    out.kind_ = ScoreKind::probabilities;
    out.num_classes_ = static_cast<int>(probabilities.cols());
    out.ids_ = std::move(ids);
    out.probs_ = std::move(probabilities);
    out.labels_ = std::move(labels);
    out.derive_predictions();
    return out;
}

LabeledDataset LabeledDataset::from_logits(std::string name, std::vector<std::string> ids,
                                           const Eigen::MatrixXd& logits, Eigen::VectorXi labels)
{
    if (!logits.allFinite()) {
        throw ValidationError("non-finite logit");
    }
    auto out = from_probabilities(std::move(name), std::move(ids), softmax_rows(logits),
                                  std::move(labels));
    out.kind_ = ScoreKind::logits;
    return out;
}

LabeledDataset LabeledDataset::with_rescored(Eigen::MatrixXd probabilities) const
{
    if (probabilities.rows() != probs_.rows() || probabilities.cols() != probs_.cols()) {
        throw ValidationError("rescored matrix has the wrong shape");
    }
    LabeledDataset out = *this;
    out.probs_ = std::move(probabilities);
    for (Index i = 0; i < out.size(); ++i) {
        out.confidence_(i) = out.probs_(i, out.predicted_(i));
    }
    return out;
}

void LabeledDataset::derive_predictions()
{
    const Index n = probs_.rows();
    predicted_.resize(n);
    confidence_.resize(n);
    for (Index i = 0; i < n; ++i) {
        const int best = argmax_lowest(probs_.row(i));
        predicted_(i) = best;
        confidence_(i) = probs_(i, best);
    }
}

double LabeledDataset::accuracy() const
{
    if (empty()) {
        throw ValidationError("accuracy of an empty dataset");
    }
    Index hits = (predicted_.array() == labels_.array()).count();
    return static_cast<double>(hits) / static_cast<double>(size());
}

PredictionRecord LabeledDataset::record(Index i) const
{
    return PredictionRecord{ids_[static_cast<std::size_t>(i)], probs_.row(i).transpose(),
                            labels_(i), predicted_(i), confidence_(i)};
}

LabeledDataset LabeledDataset::renamed(std::string name) const
{
    LabeledDataset out = *this;
    out.name_ = std::move(name);
    return out;
}

namespace {

LabeledDataset read_jsonl(std::istream& in, const std::string& name, const std::string& source,
                          ScoreKind kind, std::optional<int> num_classes)
{
    RawRows rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto where = line_prefix(source, line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(where + "malformed JSON (" + e.what() + ")");
        }
        if (!j.is_object()) {
            throw ValidationError(where + "record is not a JSON object");
        }
        if (!j.contains("id") || !j["id"].is_string()) {
            throw ValidationError(where + "missing string field 'id'");
        }
        if (!j.contains("scores") || !j["scores"].is_array()) {
            throw ValidationError(where + "missing array field 'scores'");
        }
        if (!j.contains("label") || !j["label"].is_number_integer()) {
            throw ValidationError(where + "missing integer field 'label'");
        }
        std::vector<double> scores;
        scores.reserve(j["scores"].size());
        for (const auto& s : j["scores"]) {
            if (!s.is_number()) {
                throw ValidationError(where + "non-numeric score");
            }
            scores.push_back(s.get<double>());
        }
        if (scores.empty()) {
            throw ValidationError(where + "empty score vector");
        }
        if (!rows.scores.empty() && scores.size() != rows.scores.front().size()) {
            throw ValidationError(where + "ragged score vector (expected "
                                  + std::to_string(rows.scores.front().size()) + " scores, got "
                                  + std::to_string(scores.size()) + ")");
        }
        rows.ids.push_back(j["id"].get<std::string>());
        rows.scores.push_back(std::move(scores));
        rows.labels.push_back(j["label"].get<int>());
        rows.lines.push_back(line_no);
    }
    return assemble(std::move(rows), name, source, kind, num_classes);
}

LabeledDataset read_csv(std::istream& in, const std::string& name, const std::string& source,
                        ScoreKind kind, std::optional<int> num_classes)
{
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            break;
        }
    }
    if (line_no == 0 || line.find_first_not_of(" \t\r") == std::string::npos) {
        throw ValidationError(source + ": empty dataset");
    }
    {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        auto header = split_commas(line);
        if (header.size() < 3 || header[0] != "id" || header[1] != "label") {
            throw ValidationError(line_prefix(source, line_no) + "CSV header must be id,label,s0,...");
        }
        for (std::size_t j = 2; j < header.size(); ++j) {
            if (header[j] != "s" + std::to_string(j - 2)) {
                throw ValidationError(line_prefix(source, line_no) + "unexpected CSV column '"
                                      + std::string(header[j]) + "'");
            }
        }
        width = header.size() - 2;
    }
    RawRows rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        if (line.back() == '\r') {
            line.pop_back();
        }
        const auto where = line_prefix(source, line_no);
        auto fields = split_commas(line);
        if (fields.size() != width + 2) {
            throw ValidationError(where + "ragged score vector (expected " + std::to_string(width)
                                  + " scores, got "
                                  + std::to_string(fields.size() < 2 ? 0 : fields.size() - 2)
                                  + ")");
        }
        const double label = parse_double(fields[1], where);
        if (label != std::floor(label)) {
            throw ValidationError(where + "label is not an integer");
        }
        std::vector<double> scores;
        scores.reserve(width);
        for (std::size_t j = 2; j < fields.size(); ++j) {
            scores.push_back(parse_double(fields[j], where));
        }
        rows.ids.emplace_back(fields[0]);
        rows.scores.push_back(std::move(scores));
        rows.labels.push_back(static_cast<int>(label));
        rows.lines.push_back(line_no);
    }
    return assemble(std::move(rows), name, source, kind, num_classes);
}

} // namespace

LabeledDataset parse_jsonl(std::istream& in, const std::string& name, ScoreKind kind,
                           std::optional<int> num_classes)
{
    return read_jsonl(in, name, name, kind, num_classes);
}

LabeledDataset parse_csv(std::istream& in, const std::string& name, ScoreKind kind,
                         std::optional<int> num_classes)
{
    return read_csv(in, name, name, kind, num_classes);
}

LabeledDataset load_dataset(const std::string& path, ScoreKind kind,
                            std::optional<int> num_classes)
{
    if (path == "-") {
        return read_jsonl(std::cin, "stdin", "<stdin>", kind, num_classes);
    }
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    const std::filesystem::path p(path);
    const auto name = p.stem().string();
    if (p.extension() == ".csv") {
        return read_csv(in, name, path, kind, num_classes);
    }
    return read_jsonl(in, name, path, kind, num_classes);
}

void write_jsonl(std::ostream& out, const LabeledDataset& data)
{
    char buf[32];
    for (Index i = 0; i < data.size(); ++i) {
        out << "{\"id\":" << nlohmann::json(data.ids()[static_cast<std::size_t>(i)]).dump()
            << ",\"scores\":[";
        for (Index j = 0; j < data.num_classes(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", data.probabilities()(i, j));
            out << (j ? "," : "") << buf;
        }
        out << "],\"label\":" << data.labels()(i) << "}\n";
    }
}

void save_dataset(const std::string& path, const LabeledDataset& data)
{
    if (path == "-") {
        write_jsonl(std::cout, data);
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    write_jsonl(out, data);
    if (!out) {
        throw IoError("write failed for '" + path + "'");
    }
}

SplitDiagnostics split_check(const LabeledDataset& tune, const LabeledDataset& test)
{
    SplitDiagnostics diag;
    diag.class_mismatch = tune.num_classes() != test.num_classes();
    std::unordered_set<std::string> tune_ids(tune.ids().begin(), tune.ids().end());
    for (const auto& id : test.ids()) {
        diag.overlap += tune_ids.count(id);
    }
    return diag;
}

} // namespace selval
