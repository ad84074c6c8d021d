#pragma once

// Cross-validation, scaling benchmarks and Welch's t-test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "classifier.hpp"
#include "decision_table.hpp"
#include "format.hpp"

namespace frule {

struct sample_stats {
    double mean = 0.0;
    double std = 0.0; // n-1 denominator; 0 for fewer than two values
};

inline sample_stats mean_std(const std::vector<double>& xs) {
    sample_stats s;
    if (xs.empty()) {
        return s;
    }
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - s.mean) * (x - s.mean);
        }
        s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Cross-validation

struct cv_options {
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    bool stratified = true;
    // Normalize the whole table before splitting instead of fitting ranges
    // on the training folds only.
    bool global_normalization = false;
};

struct dataset_fingerprint {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t classes = 0;
    std::uint64_t hash = 0;
};

struct eval_report {
    std::vector<double> accuracies;
    std::vector<std::size_t> rule_counts;
    double mean = 0.0;
    double std = 0.0;
    double seconds = 0.0;
    train_config config;
    cv_options options;
    dataset_fingerprint dataset;
    std::vector<std::string> warnings;
};

inline dataset_fingerprint fingerprint_of(const decision_table& table) {
    return {table.size(), table.attribute_count(), table.class_count(), table.fingerprint()};
}

// k-fold cross-validation on a raw table. Each fold trains on the remaining
// folds and scores correct/total on the held-out fold.
inline eval_report cross_validate(const decision_table& raw, const train_config& cfg, const cv_options& opts) {
    eval_report report;
    report.config = cfg;
    report.options = opts;
    report.dataset = fingerprint_of(raw);
    const auto start = std::chrono::steady_clock::now();

    const auto folds = split_folds(raw, opts.folds, opts.seed, opts.stratified);
    const decision_table global = opts.global_normalization ? normalize_min_max(raw) : decision_table{};
    if (opts.global_normalization) {
        report.warnings.push_back("normalization ranges computed on the whole table before splitting");
    }

    for (std::size_t f = 0; f < opts.folds; ++f) {
        const auto train_idx = folds.complement(f);
        const auto test_idx = folds.members(f);

        const auto train_table = opts.global_normalization ? global.subset(train_idx)
                                                           : normalize_min_max(raw.subset(train_idx));
        std::vector<bool> seen(raw.class_count(), false);
        for (auto i : train_idx) {
            seen[raw.label(i)] = true;
        }
        for (auto i : test_idx) {
            if (!seen[raw.label(i)]) {
                report.warnings.push_back("fold " + std::to_string(f) + ": class '" +
                                          raw.class_names()[raw.label(i)] + "' absent from training folds");
                seen[raw.label(i)] = true;
            }
        }

        const auto model = train(train_table, cfg, nullptr, &report.warnings);
        std::size_t correct = 0;
        for (auto i : test_idx) {
            const auto p = opts.global_normalization ? predict_normalized(model, global.row(i))
                                                     : predict(model, raw.row(i));
            if (p.label == raw.label(i)) {
                ++correct;
            }
        }
        report.accuracies.push_back(static_cast<double>(correct) / static_cast<double>(test_idx.size()));
        report.rule_counts.push_back(model.rules.size());
    }
    const auto s = mean_std(report.accuracies);
    report.mean = s.mean;
    report.std = s.std;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

// ---------------------------------------------------------------------------
// Scaling benchmark

// A classifier = inducer + extractor pairing.
struct method_spec {
    std::string name;
    frule::inducer inducer;
    frule::extractor extractor;
};

inline method_spec parse_method(std::string_view name) {
    static const std::vector<method_spec> known = {
        {"cvrc", inducer::cvr, extractor::gfrc},        {"a-cvrc", inducer::acvr, extractor::gfrc},
        {"bsrc", inducer::cvr, extractor::bsrc},        {"a-bsrc", inducer::acvr, extractor::bsrc},
        {"lem2", inducer::cvr, extractor::lem2},        {"a-lem2", inducer::acvr, extractor::lem2},
        {"vcdomle", inducer::cvr, extractor::vcdomle},  {"a-vcdomle", inducer::acvr, extractor::vcdomle},
        {"gfrc", inducer::dvr, extractor::gfrc},
    };
    for (const auto& m : known) {
        if (m.name == name) {
            return m;
        }
    }
    throw argument_error("unknown method '" + std::string(name) + "'");
}

// The unaccelerated counterpart of an accelerated method name, or "".
inline std::string counterpart_of(const std::string& accelerated) {
    if (accelerated.rfind("a-", 0) == 0) {
        return accelerated.substr(2);
    }
    return {};
}

struct timing_row {
    std::size_t instances = 0;
    std::size_t attributes = 0;
    std::string method;
    double induction_seconds = 0.0;
    double extraction_seconds = 0.0;
    std::size_t rules = 0;

    double total_seconds() const noexcept { return induction_seconds + extraction_seconds; }
};

struct speedup_row {
    std::size_t instances = 0;
    std::size_t attributes = 0;
    std::string accelerated;
    std::string baseline;
    double induction_ratio = 0.0; // baseline / accelerated
    double total_ratio = 0.0;
};

struct timing_report {
    std::vector<timing_row> rows;
    std::vector<speedup_row> speedups;
    dataset_fingerprint dataset;
};

struct benchmark_options {
    std::size_t groups = 10;
    std::uint64_t seed = 42;
    std::size_t threads = 1;
    bool attribute_scaling = false; // grow attribute prefixes instead of instance prefixes
    train_config base;              // alpha/beta/delta/seed shared by all methods
};

namespace detail {

inline void add_speedups(timing_report& report, std::size_t first_row) {
    for (std::size_t i = first_row; i < report.rows.size(); ++i) {
        const auto base_name = counterpart_of(report.rows[i].method);
        if (base_name.empty()) {
            continue;
        }
        for (std::size_t j = first_row; j < report.rows.size(); ++j) {
            if (report.rows[j].method == base_name) {
                const auto& acc = report.rows[i];
                const auto& base = report.rows[j];
                report.speedups.push_back(
                    {acc.instances, acc.attributes, acc.method, base.method,
                     acc.induction_seconds > 0 ? base.induction_seconds / acc.induction_seconds : 0.0,
                     acc.total_seconds() > 0 ? base.total_seconds() / acc.total_seconds() : 0.0});
            }
        }
    }
}

} // namespace detail

// Times each method on growing prefixes of a normalized table: prefix k is
// the union of the first k random subgroups (or the first ceil(k*m/g)
// attributes in attribute mode). Methods run one at a time.
inline timing_report benchmark_scaling(const decision_table& table, const std::vector<std::string>& methods,
                                       const benchmark_options& opts) {
    if (!table.normalized()) {
        throw domain_error("benchmark requires a normalized table");
    }
    std::vector<method_spec> specs;
    for (const auto& m : methods) {
        specs.push_back(parse_method(m));
    }
    timing_report report;
    report.dataset = fingerprint_of(table);

    std::vector<decision_table> prefixes;
    if (opts.attribute_scaling) {
        const auto m = table.attribute_count();
        const auto g = std::min(opts.groups, m);
        for (std::size_t k = 1; k <= g; ++k) {
            prefixes.push_back(table.leading_attributes((k * m + g - 1) / g));
        }
    } else {
        const auto blocks = split_subgroups(table, opts.groups, opts.seed);
        std::vector<instance_index> prefix;
        for (const auto& b : blocks) {
            prefix.insert(prefix.end(), b.begin(), b.end());
            std::vector<instance_index> sorted = prefix;
            std::sort(sorted.begin(), sorted.end());
            if (!sorted.empty()) {
                prefixes.push_back(table.subset(sorted));
            }
        }
    }

    for (const auto& t : prefixes) {
        const auto first_row = report.rows.size();
        for (const auto& spec : specs) {
            train_config cfg = opts.base;
            cfg.inducer = spec.inducer;
            cfg.extractor = spec.extractor;
            cfg.threads = opts.threads;
            train_timing timing;
            const auto model = train(t, cfg, &timing);
            report.rows.push_back({t.size(), t.attribute_count(), spec.name, timing.induction_seconds,
                                   timing.extraction_seconds, model.rules.size()});
        }
        detail::add_speedups(report, first_row);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Welch's t-test

struct t_test_result {
    double t = 0.0;
    double p = 1.0;
    bool significant_at_0_05 = false;
};

// Two-sided Welch test with Welch-Satterthwaite degrees of freedom.
inline t_test_result welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) {
        throw argument_error("welch_t_test needs at least two values per sample");
    }
    const auto sa = mean_std(a);
    const auto sb = mean_std(b);
    const double va = sa.std * sa.std / static_cast<double>(a.size());
    const double vb = sb.std * sb.std / static_cast<double>(b.size());
    const double se2 = va + vb;
    t_test_result r;
    if (se2 == 0.0) {
        // Both samples constant: equal means are indistinguishable, different
        // means are separated with certainty.
        if (sa.mean == sb.mean) {
            return r;
        }
        r.t = sa.mean > sb.mean ? INFINITY : -INFINITY;
        r.p = 0.0;
        r.significant_at_0_05 = true;
        return r;
    }
    r.t = (sa.mean - sb.mean) / std::sqrt(se2);
    const double df = se2 * se2 /
                      (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
    const boost::math::students_t dist(df);
    r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t))));
    r.significant_at_0_05 = r.p < 0.05;
    return r;
}

// ---------------------------------------------------------------------------
// Report output

inline nlohmann::ordered_json to_json(const eval_report& r) {
    nlohmann::ordered_json j;
    j["dataset"] = {{"n", r.dataset.n},
                    {"m", r.dataset.m},
                    {"classes", r.dataset.classes},
                    {"hash", format_hash(r.dataset.hash)}};
    j["config"] = {{"alpha", r.config.alpha},
                   {"inducer", to_string(r.config.inducer)},
                   {"extractor", to_string(r.config.extractor)},
                   {"beta", r.config.beta},
                   {"delta", r.config.delta},
                   {"seed", r.config.seed}};
    j["folds"] = r.options.folds;
    j["fold_seed"] = r.options.seed;
    j["stratified"] = r.options.stratified;
    j["normalization"] = r.options.global_normalization ? "global" : "training-folds";
    j["accuracies"] = r.accuracies;
    j["rule_counts"] = r.rule_counts;
    j["accuracy_mean"] = r.mean;
    j["accuracy_std"] = r.std;
    j["warnings"] = r.warnings;
    return j;
}

inline nlohmann::ordered_json to_json(const timing_report& r) {
    nlohmann::ordered_json j;
    j["dataset"] = {{"n", r.dataset.n},
                    {"m", r.dataset.m},
                    {"classes", r.dataset.classes},
                    {"hash", format_hash(r.dataset.hash)}};
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"instances", row.instances},
                        {"attributes", row.attributes},
                        {"method", row.method},
                        {"induction_seconds", row.induction_seconds},
                        {"extraction_seconds", row.extraction_seconds},
                        {"rules", row.rules}});
    }
    j["rows"] = std::move(rows);
    auto sp = nlohmann::ordered_json::array();
    for (const auto& s : r.speedups) {
        sp.push_back({{"instances", s.instances},
                      {"attributes", s.attributes},
                      {"accelerated", s.accelerated},
                      {"baseline", s.baseline},
                      {"induction_ratio", s.induction_ratio},
                      {"total_ratio", s.total_ratio}});
    }
    j["speedups"] = std::move(sp);
    return j;
}

inline void write_report_csv_header(std::ostream& out) {
    out << "dataset,n_prefix,method,phase,seconds,rules,accuracy_mean,accuracy_std\n";
}

// One row per (prefix, method) with phase "train", or separate "induction"
// and "extraction" rows when split_phases is set.
inline void write_report_csv(std::ostream& out, const std::string& dataset, const timing_report& r,
                             bool split_phases = false) {
    for (const auto& row : r.rows) {
        const auto n = row.instances;
        if (split_phases) {
            out << dataset << ',' << n << ',' << row.method << ",induction," << format_real(row.induction_seconds)
                << ',' << row.rules << ",,\n";
            out << dataset << ',' << n << ',' << row.method << ",extraction,"
                << format_real(row.extraction_seconds) << ',' << row.rules << ",,\n";
        } else {
            out << dataset << ',' << n << ',' << row.method << ",train," << format_real(row.total_seconds()) << ','
                << row.rules << ",,\n";
        }
    }
}

inline void write_report_csv(std::ostream& out, const std::string& dataset, const std::string& method,
                             const eval_report& r) {
    const auto rules = mean_std(std::vector<double>(r.rule_counts.begin(), r.rule_counts.end()));
    out << dataset << ',' << r.dataset.n << ',' << method << ",cv," << format_real(r.seconds) << ','
        << format_real(rules.mean) << ',' << format_real(r.mean) << ',' << format_real(r.std) << '\n';
}

} // namespace frule
