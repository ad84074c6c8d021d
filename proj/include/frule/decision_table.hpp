#pragma once

// Decision tables: condition attributes plus a crisp class label per
// instance. Values are stored column-major since every induction kernel
// scans one attribute across many instances.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace frule {

using attribute_index = std::size_t;
using instance_index = std::size_t;
using class_id = std::size_t;

// Raw-data range of one attribute, used to map raw values into [0,1].
struct value_range {
    double min = 0.0;
    double max = 1.0;

    double normalize(double v) const noexcept {
        return max > min ? (v - min) / (max - min) : 0.0;
    }
    bool operator==(const value_range&) const = default;
};

class decision_table {
public:
    decision_table() = default;

    // rows: n rows of m values each; labels: class id per row, dense in
    // [0, class_names.size()).
    decision_table(const std::vector<std::vector<double>>& rows, std::vector<class_id> labels,
                   std::vector<std::string> attribute_names, std::vector<std::string> class_names,
                   bool normalized, std::vector<value_range> ranges = {})
        : labels_(std::move(labels)),
          attribute_names_(std::move(attribute_names)),
          class_names_(std::move(class_names)),
          ranges_(std::move(ranges)),
          normalized_(normalized) {
        n_ = rows.size();
        if (n_ == 0) {
            throw empty_input_error("decision table has no instances");
        }
        m_ = rows.front().size();
        if (m_ == 0) {
            throw argument_error("decision table has no condition attributes");
        }
        if (labels_.size() != n_) {
            throw argument_error("label count does not match instance count");
        }
        values_.resize(n_ * m_);
        for (std::size_t i = 0; i < n_; ++i) {
            if (rows[i].size() != m_) {
                throw argument_error("row " + std::to_string(i) + " has wrong arity");
            }
            for (std::size_t a = 0; a < m_; ++a) {
                values_[a * n_ + i] = rows[i][a];
            }
        }
        if (attribute_names_.empty()) {
            for (std::size_t a = 0; a < m_; ++a) {
                attribute_names_.push_back("a" + std::to_string(a + 1));
            }
        }
        if (attribute_names_.size() != m_) {
            throw argument_error("attribute name count does not match attribute count");
        }
        const auto max_label = *std::max_element(labels_.begin(), labels_.end());
        if (class_names_.empty()) {
            for (std::size_t c = 0; c <= max_label; ++c) {
                class_names_.push_back(std::to_string(c));
            }
        }
        if (max_label >= class_names_.size()) {
            throw argument_error("label id outside the class name table");
        }
        if (ranges_.empty()) {
            ranges_.assign(m_, value_range{});
        }
        if (ranges_.size() != m_) {
            throw argument_error("range count does not match attribute count");
        }
        if (normalized_) {
            for (double v : values_) {
                if (!(v >= 0.0 && v <= 1.0)) {
                    throw domain_error("normalized table holds a value outside [0,1]");
                }
            }
        }
    }

    // A table whose values are already in [0,1]; the stored ranges are the
    // identity map.
    static decision_table from_normalized(const std::vector<std::vector<double>>& rows,
                                          std::vector<class_id> labels,
                                          std::vector<std::string> class_names = {},
                                          std::vector<std::string> attribute_names = {}) {
        return decision_table(rows, std::move(labels), std::move(attribute_names),
                              std::move(class_names), true);
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t attribute_count() const noexcept { return m_; }
    std::size_t class_count() const noexcept { return class_names_.size(); }
    bool normalized() const noexcept { return normalized_; }

    double value(instance_index i, attribute_index a) const noexcept { return values_[a * n_ + i]; }
    std::span<const double> column(attribute_index a) const noexcept {
        return {values_.data() + a * n_, n_};
    }
    std::vector<double> row(instance_index i) const {
        std::vector<double> r(m_);
        for (std::size_t a = 0; a < m_; ++a) {
            r[a] = value(i, a);
        }
        return r;
    }
    std::vector<std::vector<double>> rows() const {
        std::vector<std::vector<double>> out;
        out.reserve(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            out.push_back(row(i));
        }
        return out;
    }

    class_id label(instance_index i) const noexcept { return labels_[i]; }
    const std::vector<class_id>& labels() const noexcept { return labels_; }
    const std::vector<std::string>& attribute_names() const noexcept { return attribute_names_; }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }
    const std::vector<value_range>& ranges() const noexcept { return ranges_; }

    void check_instance(instance_index i) const {
        if (i >= n_) {
            throw index_error("instance index " + std::to_string(i) + " out of range (n=" +
                              std::to_string(n_) + ")");
        }
    }
    void check_attribute(attribute_index a) const {
        if (a >= m_) {
            throw index_error("attribute index " + std::to_string(a) + " out of range (m=" +
                              std::to_string(m_) + ")");
        }
    }

    // Rows selected by `indices`, in that order. Class names, attribute names,
    // ranges and the normalized flag carry over.
    decision_table subset(std::span<const instance_index> indices) const {
        std::vector<std::vector<double>> r;
        std::vector<class_id> l;
        r.reserve(indices.size());
        l.reserve(indices.size());
        for (auto i : indices) {
            check_instance(i);
            r.push_back(row(i));
            l.push_back(labels_[i]);
        }
        return decision_table(r, std::move(l), attribute_names_, class_names_, normalized_, ranges_);
    }

    // Condition attributes restricted to the first `count` columns.
    decision_table leading_attributes(std::size_t count) const {
        if (count == 0 || count > m_) {
            throw argument_error("attribute prefix must be in [1, m]");
        }
        std::vector<std::vector<double>> r(n_, std::vector<double>(count));
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t a = 0; a < count; ++a) {
                r[i][a] = value(i, a);
            }
        }
        return decision_table(
            r, labels_,
            std::vector<std::string>(attribute_names_.begin(), attribute_names_.begin() + count),
            class_names_, normalized_,
            std::vector<value_range>(ranges_.begin(), ranges_.begin() + count));
    }

    // FNV-1a over shape, values and labels.
    std::uint64_t fingerprint() const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        auto mix = [&h](std::uint64_t v) {
            for (int b = 0; b < 8; ++b) {
                h ^= (v >> (8 * b)) & 0xffU;
                h *= 1099511628211ULL;
            }
        };
        mix(n_);
        mix(m_);
        for (double v : values_) {
            std::uint64_t bits;
            static_assert(sizeof bits == sizeof v);
            std::memcpy(&bits, &v, sizeof v);
            mix(bits);
        }
        for (auto l : labels_) {
            mix(l);
        }
        return h;
    }

private:
    std::vector<double> values_;
    std::vector<class_id> labels_;
    std::vector<std::string> attribute_names_;
    std::vector<std::string> class_names_;
    std::vector<value_range> ranges_;
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    bool normalized_ = false;
};

// ---------------------------------------------------------------------------
// CSV ingestion

// Which CSV column holds the class label.
class column_selector {
public:
    static column_selector last() { return column_selector{}; }
    static column_selector index(std::size_t i) {
        column_selector s;
        s.index_ = i;
        return s;
    }
    static column_selector name(std::string n) {
        column_selector s;
        s.name_ = std::move(n);
        return s;
    }
    // "" or "last" -> last column, all digits -> 0-based index, else a header name.
    static column_selector parse(std::string_view text) {
        if (text.empty() || text == "last") {
            return last();
        }
        if (std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            std::size_t i = 0;
            std::from_chars(text.data(), text.data() + text.size(), i);
            return index(i);
        }
        return name(std::string(text));
    }

    std::size_t resolve(const std::vector<std::string>& header, std::size_t width) const {
        if (name_) {
            auto it = std::find(header.begin(), header.end(), *name_);
            if (it == header.end()) {
                throw parse_error("label column '" + *name_ + "' not found in header", 1, 0);
            }
            return static_cast<std::size_t>(it - header.begin());
        }
        if (index_) {
            if (*index_ >= width) {
                throw parse_error("label column index " + std::to_string(*index_) +
                                      " out of range",
                                  0, 0);
            }
            return *index_;
        }
        return width - 1;
    }

private:
    std::optional<std::size_t> index_;
    std::optional<std::string> name_;
};

struct csv_options {
    bool has_header = true;
    column_selector label_column = column_selector::last();
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

inline std::optional<double> parse_real(std::string_view cell) {
    if (cell.empty()) {
        return std::nullopt;
    }
    if (cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        return std::nullopt;
    }
    return v;
}

} // namespace detail

// Reads a raw (not yet normalized) table. Class ids follow first appearance.
inline decision_table read_csv(std::istream& in, const csv_options& opts = {}) {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<class_id> labels;
    std::vector<std::string> class_names;
    std::map<std::string, class_id, std::less<>> class_ids;
    std::optional<std::size_t> width;
    std::size_t label_col = 0;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        auto cells = detail::split_csv_line(line);
        if (!width) {
            width = cells.size();
            if (*width < 2) {
                throw parse_error("CSV needs at least one condition column and a label column",
                                  line_no, 0);
            }
            if (opts.has_header) {
                for (auto c : cells) {
                    header.emplace_back(c);
                }
                label_col = opts.label_column.resolve(header, *width);
                continue;
            }
            label_col = opts.label_column.resolve(header, *width);
        }
        if (cells.size() != *width) {
            throw parse_error("row " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(*width),
                              line_no, 0);
        }
        std::vector<double> r;
        r.reserve(*width - 1);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label_col) {
                if (cells[c].empty()) {
                    throw parse_error("missing label at row " + std::to_string(line_no), line_no,
                                      c + 1);
                }
                continue;
            }
            auto v = detail::parse_real(cells[c]);
            if (!v || !std::isfinite(*v)) {
                throw parse_error("cannot parse '" + std::string(cells[c]) + "' as a real at row " +
                                      std::to_string(line_no) + ", column " + std::to_string(c + 1),
                                  line_no, c + 1);
            }
            r.push_back(*v);
        }
        auto [it, inserted] = class_ids.try_emplace(std::string(cells[label_col]), class_names.size());
        if (inserted) {
            class_names.emplace_back(cells[label_col]);
        }
        labels.push_back(it->second);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) {
        throw empty_input_error("CSV input contains no data rows");
    }
    std::vector<std::string> attribute_names;
    if (!header.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c != label_col) {
                attribute_names.push_back(header[c]);
            }
        }
    }
    return decision_table(rows, std::move(labels), std::move(attribute_names),
                          std::move(class_names), false);
}

inline decision_table load_csv(const std::string& path, const csv_options& opts = {}) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open '" + path + "'");
    }
    return read_csv(in, opts);
}

// ---------------------------------------------------------------------------
// Preprocessing

// Min-max scaling per attribute; constant columns become 0. The ranges are
// kept for prediction-time reuse. A table that is already normalized is
// returned unchanged.
inline decision_table normalize_min_max(const decision_table& table) {
    if (table.normalized()) {
        return table;
    }
    const auto n = table.size();
    const auto m = table.attribute_count();
    std::vector<value_range> ranges(m);
    for (std::size_t a = 0; a < m; ++a) {
        auto col = table.column(a);
        const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        ranges[a] = value_range{*lo, *hi};
    }
    std::vector<std::vector<double>> rows(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < m; ++a) {
            rows[i][a] = std::clamp(ranges[a].normalize(table.value(i, a)), 0.0, 1.0);
        }
    }
    return decision_table(rows, table.labels(), table.attribute_names(), table.class_names(), true,
                          std::move(ranges));
}

// Groups of instances sharing an identical condition row but carrying more
// than one label. Each group is sorted; groups are ordered by first member.
inline std::vector<std::vector<instance_index>> inconsistent_groups(const decision_table& table) {
    std::map<std::vector<double>, std::vector<instance_index>> by_row;
    for (std::size_t i = 0; i < table.size(); ++i) {
        by_row[table.row(i)].push_back(i);
    }
    std::vector<std::vector<instance_index>> groups;
    for (auto& [row, members] : by_row) {
        const auto l0 = table.label(members.front());
        if (std::any_of(members.begin(), members.end(),
                        [&](auto i) { return table.label(i) != l0; })) {
            groups.push_back(std::move(members));
        }
    }
    std::sort(groups.begin(), groups.end());
    return groups;
}

struct consistency_filter_result {
    decision_table table;
    std::size_t removed = 0;
    std::vector<instance_index> kept; // original indices of surviving rows
};

// Removes every member of every conflicting duplicate group.
inline consistency_filter_result drop_inconsistent(const decision_table& table) {
    std::vector<bool> drop(table.size(), false);
    std::size_t removed = 0;
    for (const auto& g : inconsistent_groups(table)) {
        for (auto i : g) {
            drop[i] = true;
            ++removed;
        }
    }
    std::vector<instance_index> kept;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (!drop[i]) {
            kept.push_back(i);
        }
    }
    if (kept.empty()) {
        throw empty_input_error("every instance is inconsistent; nothing left after filtering");
    }
    if (removed == 0) {
        return {table, 0, std::move(kept)};
    }
    return {table.subset(kept), removed, std::move(kept)};
}

// ---------------------------------------------------------------------------
// Splitting

struct fold_assignment {
    std::vector<std::size_t> fold_of;
    std::size_t k = 0;
    std::uint64_t seed = 0;

    std::vector<instance_index> members(std::size_t fold) const {
        std::vector<instance_index> out;
        for (std::size_t i = 0; i < fold_of.size(); ++i) {
            if (fold_of[i] == fold) {
                out.push_back(i);
            }
        }
        return out;
    }
    std::vector<instance_index> complement(std::size_t fold) const {
        std::vector<instance_index> out;
        for (std::size_t i = 0; i < fold_of.size(); ++i) {
            if (fold_of[i] != fold) {
                out.push_back(i);
            }
        }
        return out;
    }
};

// Shuffles instances (within each class when stratified) and deals them
// round-robin over the folds.
inline fold_assignment split_folds(std::size_t n, std::span<const class_id> labels, std::size_t k,
                                   std::uint64_t seed, bool stratified) {
    if (k < 2) {
        throw argument_error("fold count must be at least 2");
    }
    if (k > n) {
        throw argument_error("fold count " + std::to_string(k) + " exceeds instance count " +
                             std::to_string(n));
    }
    rng gen(seed);
    std::vector<instance_index> order;
    order.reserve(n);
    if (stratified) {
        const auto classes = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
        for (std::size_t c = 0; c < classes; ++c) {
            std::vector<instance_index> members;
            for (std::size_t i = 0; i < n; ++i) {
                if (labels[i] == c) {
                    members.push_back(i);
                }
            }
            gen.shuffle(std::span(members));
            order.insert(order.end(), members.begin(), members.end());
        }
    } else {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        gen.shuffle(std::span(order));
    }
    fold_assignment out{std::vector<std::size_t>(n), k, seed};
    for (std::size_t p = 0; p < order.size(); ++p) {
        out.fold_of[order[p]] = p % k;
    }
    return out;
}

inline fold_assignment split_folds(const decision_table& table, std::size_t k, std::uint64_t seed,
                                   bool stratified) {
    return split_folds(table.size(), table.labels(), k, seed, stratified);
}

// g near-equal random blocks; the first n % g blocks get one extra instance.
// Indices inside a block are ascending.
inline std::vector<std::vector<instance_index>> split_subgroups(std::size_t n, std::size_t g,
                                                                std::uint64_t seed) {
    if (g < 1) {
        throw argument_error("subgroup count must be at least 1");
    }
    std::vector<instance_index> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng(seed).shuffle(std::span(order));
    std::vector<std::vector<instance_index>> blocks(g);
    const auto base = n / g;
    const auto extra = n % g;
    std::size_t pos = 0;
    for (std::size_t b = 0; b < g; ++b) {
        const auto len = base + (b < extra ? 1 : 0);
        blocks[b].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                         order.begin() + static_cast<std::ptrdiff_t>(pos + len));
        std::sort(blocks[b].begin(), blocks[b].end());
        pos += len;
    }
    return blocks;
}

inline std::vector<std::vector<instance_index>> split_subgroups(const decision_table& table,
                                                                std::size_t g, std::uint64_t seed) {
    return split_subgroups(table.size(), g, seed);
}

// instance_index,fold
inline void write_fold_csv(std::ostream& out, const fold_assignment& folds) {
    out << "instance_index,fold\n";
    for (std::size_t i = 0; i < folds.fold_of.size(); ++i) {
        out << i << ',' << folds.fold_of[i] << '\n';
    }
}

} // namespace frule
