#include "rankpi/data.hpp"

#include "rankpi/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace rankpi {

LabelSet::LabelSet(std::vector<int> present, int q) : present_{std::move(present)}, q_{q} {
    if (q_ < 0) {
        throw std::invalid_argument("label universe size must be non-negative");
    }
    std::sort(present_.begin(), present_.end());
    for (std::size_t t = 0; t < present_.size(); ++t) {
        if (present_[t] < 0 || present_[t] >= q_) {
            throw std::invalid_argument("label index " + std::to_string(present_[t]) + " outside [0, " +
                                        std::to_string(q_) + ")");
        }
        if (t > 0 && present_[t] == present_[t - 1]) {
            throw std::invalid_argument("duplicate label index " + std::to_string(present_[t]));
        }
    }
}

std::vector<int> LabelSet::absent() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(absent_size()));
    for (int k = 0; k < q_; ++k) {
        if (!contains(k)) {
            out.push_back(k);
        }
    }
    return out;
}

bool LabelSet::contains(int k) const noexcept {
    return std::binary_search(present_.begin(), present_.end(), k);
}

MultiLabelDataset::MultiLabelDataset(FeatureMatrix available, FeatureMatrix privileged, std::vector<LabelSet> labels)
    : available_{std::move(available)}, privileged_{std::move(privileged)}, labels_{std::move(labels)} {
    if (labels_.empty()) {
        throw DataError("dataset must contain at least one instance");
    }
    const int q = labels_.front().q();
    if (q < 2) {
        throw DataError("dataset needs at least 2 labels, got q = " + std::to_string(q));
    }
    for (const auto &y : labels_) {
        if (y.q() != q) {
            throw DataError("label sets disagree on the label universe size");
        }
    }
    if (available_.rows() != n()) {
        throw DataError("available feature rows do not match the instance count");
    }
    if (available_.cols() == 0) {
        throw DataError("available features are empty");
    }
    if (privileged_.cols() > 0 && privileged_.rows() != n()) {
        throw DataError("privileged feature rows do not match the instance count");
    }
    if (privileged_.cols() == 0) {
        privileged_.resize(n(), 0);
    }
}

Instance MultiLabelDataset::instance(int i) const {
    return Instance{available_.row(i).transpose(), privileged_.row(i).transpose(), label(i)};
}

MultiLabelDataset MultiLabelDataset::subset(std::span<const int> rows) const {
    const auto count = static_cast<Eigen::Index>(rows.size());
    FeatureMatrix avail(count, available_.cols());
    FeatureMatrix priv(count, privileged_.cols());
    std::vector<LabelSet> labels;
    labels.reserve(rows.size());
    for (Eigen::Index r = 0; r < count; ++r) {
        const int src = rows[static_cast<std::size_t>(r)];
        avail.row(r) = available_.row(src);
        priv.row(r) = privileged_.row(src);
        labels.push_back(label(src));
    }
    return MultiLabelDataset(std::move(avail), std::move(priv), std::move(labels));
}

MultiLabelDataset MultiLabelDataset::without_privileged() const {
    return MultiLabelDataset(available_, FeatureMatrix(n(), 0), labels_);
}

std::vector<RankingPair> ranking_pairs(const LabelSet &labels, int i) {
    std::vector<RankingPair> pairs;
    const auto absent = labels.absent();
    pairs.reserve(labels.present().size() * absent.size());
    for (int j : labels.present()) {
        for (int l : absent) {
            pairs.push_back(RankingPair{i, j, l});
        }
    }
    return pairs;
}

std::vector<RankingPair> ranking_pairs(const MultiLabelDataset &ds, int i) {
    return ranking_pairs(ds.label(i), i);
}

std::string format_real(double value) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(len));
}

namespace {

struct SparseRow {
    std::vector<std::pair<int, double>> entries;  // 1-based index, value
};

struct ParsedLine {
    std::vector<int> labels;
    SparseRow features;
};

[[noreturn]] void fail(std::string_view what, std::size_t line_no, std::string_view detail) {
    std::ostringstream msg;
    msg << what << " line " << line_no << ": " << detail;
    throw DataError(msg.str());
}

bool is_blank(char c) { return c == ' ' || c == '\t'; }

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        while (pos < s.size() && is_blank(s[pos])) {
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < s.size() && !is_blank(s[pos])) {
            ++pos;
        }
        if (pos > start) {
            out.push_back(s.substr(start, pos - start));
        }
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view token, T &out) {
    if (token.empty()) {
        return false;
    }
    if constexpr (std::is_floating_point_v<T>) {
        // from_chars rejects a leading '+', which printf-style writers may emit.
        if (token.front() == '+') {
            token.remove_prefix(1);
        }
    }
    const auto *first = token.data();
    const auto *last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::vector<int> parse_label_field(std::string_view field, std::string_view what, std::size_t line_no) {
    std::vector<int> labels;
    if (field.empty()) {
        return labels;
    }
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = field.find(',', pos);
        const auto token = field.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        int value = 0;
        if (!parse_number(token, value)) {
            fail(what, line_no, "malformed label field '" + std::string(field) + "'");
        }
        if (value < 0) {
            fail(what, line_no, "negative label index " + std::to_string(value));
        }
        labels.push_back(value);
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    std::vector<int> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        fail(what, line_no, "duplicate label in '" + std::string(field) + "'");
    }
    return labels;
}

SparseRow parse_features(std::string_view rest, std::string_view what, std::size_t line_no) {
    SparseRow row;
    int previous = 0;
    for (auto token : split_ws(rest)) {
        const auto colon = token.find(':');
        if (colon == std::string_view::npos) {
            fail(what, line_no, "expected idx:value, got '" + std::string(token) + "'");
        }
        int index = 0;
        double value = 0.0;
        if (!parse_number(token.substr(0, colon), index) || index < 1) {
            fail(what, line_no, "bad feature index in '" + std::string(token) + "'");
        }
        if (!parse_number(token.substr(colon + 1), value)) {
            fail(what, line_no, "bad feature value in '" + std::string(token) + "'");
        }
        if (index <= previous) {
            fail(what, line_no, "feature indices must be strictly increasing");
        }
        previous = index;
        row.entries.emplace_back(index, value);
    }
    return row;
}

/// Reads data lines, skipping '#' comments; yields (line number, content).
std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream &in) {
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty() && line.front() == '#') {
            continue;
        }
        lines.emplace_back(line_no, std::move(line));
    }
    return lines;
}

int max_index(const std::vector<SparseRow> &rows) {
    int d = 0;
    for (const auto &row : rows) {
        if (!row.entries.empty()) {
            d = std::max(d, row.entries.back().first);
        }
    }
    return d;
}

FeatureMatrix densify(const std::vector<SparseRow> &rows, int d) {
    FeatureMatrix out = FeatureMatrix::Zero(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (const auto &[index, value] : rows[r].entries) {
            out(static_cast<Eigen::Index>(r), index - 1) = value;
        }
    }
    return out;
}

void write_sparse_row(std::ostream &out, const auto &row) {
    for (Eigen::Index c = 0; c < row.size(); ++c) {
        if (row(c) != 0.0) {
            out << ' ' << (c + 1) << ':' << format_real(row(c));
        }
    }
}

void write_label_field(std::ostream &out, const LabelSet &labels) {
    const auto &present = labels.present();
    for (std::size_t t = 0; t < present.size(); ++t) {
        if (t > 0) {
            out << ',';
        }
        out << present[t];
    }
}

std::ifstream open_input(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    return out;
}

std::vector<LabelSet> to_label_sets(const std::vector<std::vector<int>> &raw, std::optional<int> q) {
    int universe = 0;
    for (const auto &labels : raw) {
        for (int k : labels) {
            universe = std::max(universe, k + 1);
        }
    }
    if (q) {
        if (*q < universe) {
            throw DataError("label index " + std::to_string(universe - 1) + " exceeds the label universe q = " +
                            std::to_string(*q));
        }
        universe = *q;
    }
    std::vector<LabelSet> sets;
    sets.reserve(raw.size());
    for (const auto &labels : raw) {
        sets.emplace_back(labels, universe);
    }
    return sets;
}

}  // namespace

MultiLabelDataset read_dataset(std::istream &available, std::istream *privileged, const LoadOptions &options) {
    const auto avail_lines = read_lines(available);
    std::vector<std::vector<int>> raw_labels;
    std::vector<SparseRow> avail_rows;
    raw_labels.reserve(avail_lines.size());
    avail_rows.reserve(avail_lines.size());
    for (const auto &[line_no, line] : avail_lines) {
        const std::string_view view{line};
        const auto space = view.find_first_of(" \t");
        const auto field = view.substr(0, space);
        if (field.find(':') != std::string_view::npos) {
            fail("available", line_no, "missing label field (start the line with a space for an empty label set)");
        }
        raw_labels.push_back(parse_label_field(field, "available", line_no));
        avail_rows.push_back(
            parse_features(space == std::string_view::npos ? std::string_view{} : view.substr(space), "available",
                           line_no));
    }
    if (avail_rows.empty()) {
        throw DataError("available file contains no instances");
    }

    std::vector<SparseRow> priv_rows;
    if (privileged != nullptr) {
        const auto priv_lines = read_lines(*privileged);
        if (priv_lines.size() != avail_lines.size()) {
            throw DataError("aligned file length mismatch: available has " + std::to_string(avail_lines.size()) +
                            " instances, privileged has " + std::to_string(priv_lines.size()));
        }
        priv_rows.reserve(priv_lines.size());
        for (const auto &[line_no, line] : priv_lines) {
            priv_rows.push_back(parse_features(line, "privileged", line_no));
        }
    }

    const int d = std::max(max_index(avail_rows), options.min_d);
    FeatureMatrix avail = densify(avail_rows, d);
    FeatureMatrix priv(static_cast<Eigen::Index>(avail_rows.size()), 0);
    if (privileged != nullptr) {
        priv = densify(priv_rows, std::max(max_index(priv_rows), options.min_d_star));
    }
    return MultiLabelDataset(std::move(avail), std::move(priv), to_label_sets(raw_labels, options.q));
}

MultiLabelDataset load_dataset(const std::filesystem::path &available,
                               const std::optional<std::filesystem::path> &privileged, const LoadOptions &options) {
    auto avail_in = open_input(available);
    if (privileged) {
        auto priv_in = open_input(*privileged);
        return read_dataset(avail_in, &priv_in, options);
    }
    return read_dataset(avail_in, nullptr, options);
}

void write_dataset(const MultiLabelDataset &ds, std::ostream &available, std::ostream *privileged) {
    for (int i = 0; i < ds.n(); ++i) {
        write_label_field(available, ds.label(i));
        write_sparse_row(available, ds.available().row(i));
        available << '\n';
        if (privileged != nullptr) {
            std::ostringstream line;
            write_sparse_row(line, ds.privileged().row(i));
            const auto text = line.str();
            *privileged << (text.empty() ? text : text.substr(1)) << '\n';
        }
    }
}

void save_dataset(const MultiLabelDataset &ds, const std::filesystem::path &available,
                  const std::optional<std::filesystem::path> &privileged) {
    auto avail_out = open_output(available);
    if (privileged) {
        auto priv_out = open_output(*privileged);
        write_dataset(ds, avail_out, &priv_out);
        return;
    }
    write_dataset(ds, avail_out, nullptr);
}

std::vector<LabelSet> read_label_lists(std::istream &in, std::optional<int> q) {
    std::vector<std::vector<int>> raw;
    for (const auto &[line_no, line] : read_lines(in)) {
        const std::string_view view{line};
        const auto field = view.substr(0, view.find_first_of(" \t"));
        raw.push_back(parse_label_field(field, "label list", line_no));
    }
    return to_label_sets(raw, q);
}

std::vector<LabelSet> load_label_lists(const std::filesystem::path &path, std::optional<int> q) {
    auto in = open_input(path);
    return read_label_lists(in, q);
}

void write_label_lists(std::span<const LabelSet> sets, std::ostream &out) {
    for (const auto &labels : sets) {
        write_label_field(out, labels);
        out << '\n';
    }
}

void save_label_lists(std::span<const LabelSet> sets, const std::filesystem::path &path) {
    auto out = open_output(path);
    write_label_lists(sets, out);
}

}  // namespace rankpi
