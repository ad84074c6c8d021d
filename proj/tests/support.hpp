#pragma once

// Fixtures, a seeded random-table corpus, and brute-force oracles written
// directly from the definitions (no library kernels).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include <frule/frule.hpp>

namespace frule::oracle {

// x1=(0,0)/A, x2=(1,0.2)/B, x3=(0.5,0)/B
inline decision_table t0() {
    return decision_table::from_normalized({{0.0, 0.0}, {1.0, 0.2}, {0.5, 0.0}}, {0, 1, 1}, {"A", "B"});
}

struct corpus_options {
    std::size_t min_n = 5, max_n = 40;
    std::size_t min_m = 2, max_m = 8;
    std::size_t max_classes = 3;
    int grid = 10; // values k/grid
};

// Random table on a value grid with conflicting duplicate rows removed
// (same-class duplicates kept). Always has at least one instance.
inline decision_table random_table(std::uint64_t seed, const corpus_options& o = {}) {
    std::mt19937_64 gen(seed);
    auto uniform = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(gen);
    };
    const auto n = uniform(o.min_n, o.max_n);
    const auto m = uniform(o.min_m, o.max_m);
    const auto k = uniform(2, o.max_classes);
    std::vector<std::vector<double>> rows(n, std::vector<double>(m));
    std::vector<class_id> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : rows[i]) {
            v = static_cast<double>(uniform(0, static_cast<std::size_t>(o.grid))) / o.grid;
        }
        labels[i] = uniform(0, k - 1);
    }
    std::map<std::vector<double>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        groups[rows[i]].push_back(i);
    }
    std::vector<bool> drop(n, false);
    for (const auto& [row, members] : groups) {
        for (auto i : members) {
            if (labels[i] != labels[members.front()]) {
                for (auto j : members) {
                    drop[j] = true;
                }
            }
        }
    }
    std::vector<std::vector<double>> kept_rows;
    std::vector<class_id> kept_labels;
    for (std::size_t i = 0; i < n; ++i) {
        if (!drop[i]) {
            kept_rows.push_back(rows[i]);
            kept_labels.push_back(labels[i]);
        }
    }
    if (kept_rows.empty()) {
        kept_rows.push_back(rows[0]);
        kept_labels.push_back(0);
    }
    std::vector<std::string> names;
    for (std::size_t c = 0; c < k; ++c) {
        names.push_back("c" + std::to_string(c));
    }
    return decision_table::from_normalized(kept_rows, kept_labels, names);
}

// R_B(x,y) = min over a in B of 1-|x_a - y_a|, 1 for B empty.
inline double oracle_similarity(const decision_table& t, const std::vector<std::size_t>& b, std::size_t x,
                                std::size_t y) {
    double r = 1.0;
    for (auto a : b) {
        r = std::min(r, 1.0 - std::fabs(t.value(x, a) - t.value(y, a)));
    }
    return r;
}

// Con_{B,alpha}(x) by a heterogeneous-pair scan.
inline double oracle_con(const decision_table& t, const std::vector<std::size_t>& b, double alpha, std::size_t x) {
    double con = 1.0;
    for (std::size_t y = 0; y < t.size(); ++y) {
        if (t.label(y) != t.label(x)) {
            con = std::min(con, std::min(1.0, (1.0 - oracle_similarity(t, b, x, y)) + alpha));
        }
    }
    return con;
}

inline std::vector<std::size_t> all_of(const decision_table& t) {
    std::vector<std::size_t> c(t.attribute_count());
    for (std::size_t a = 0; a < c.size(); ++a) {
        c[a] = a;
    }
    return c;
}

inline std::vector<std::size_t> bits_to_set(std::uint32_t mask, std::size_t m) {
    std::vector<std::size_t> s;
    for (std::size_t a = 0; a < m; ++a) {
        if (mask & (1u << a)) {
            s.push_back(a);
        }
    }
    return s;
}

// Both conditions of a value reduct, checked against the oracle Con.
inline bool oracle_is_reduct(const decision_table& t, std::vector<std::size_t> b, double alpha, std::size_t x) {
    const double full = oracle_con(t, all_of(t), alpha, x);
    if (oracle_con(t, b, alpha, x) != full) {
        return false;
    }
    for (std::size_t k = 0; k < b.size(); ++k) {
        auto without = b;
        without.erase(without.begin() + static_cast<std::ptrdiff_t>(k));
        if (oracle_con(t, without, alpha, x) == full) {
            return false;
        }
    }
    return true;
}

// All minimal-by-inclusion subsets preserving Con_C, by exhaustive enumeration.
inline std::vector<std::vector<std::size_t>> oracle_minimal_reducts(const decision_table& t, double alpha,
                                                                    std::size_t x) {
    const auto m = t.attribute_count();
    const double full = oracle_con(t, all_of(t), alpha, x);
    std::vector<std::uint32_t> preserving;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        if (oracle_con(t, bits_to_set(mask, m), alpha, x) == full) {
            preserving.push_back(mask);
        }
    }
    std::vector<std::vector<std::size_t>> out;
    for (auto mask : preserving) {
        const bool minimal = std::none_of(preserving.begin(), preserving.end(), [&](auto other) {
            return other != mask && (other & mask) == other;
        });
        if (minimal) {
            out.push_back(bits_to_set(mask, m));
        }
    }
    return out;
}

inline std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace frule::oracle
