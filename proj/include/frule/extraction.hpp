#pragma once

// Rule cover semantics and the three extraction strategies that pick a
// near-minimal rule subset from the induced rules:
//   gfrc    - forward selection by maximum cover degree
//   lem2    - backward deletion of rules covered by another rule
//   vcdomle - backward deletion of rules whose covered instances are all
//             covered by the remaining rules
//
// A rule covers an instance y when y has the rule's class and lies strictly
// inside the rule's consistence ball: S(N(R_B(x_rule, y)), alpha) < radius.
// A rule covers another rule when it covers that rule's generating instance.

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "decision_table.hpp"
#include "induction.hpp"
#include "parallel.hpp"

namespace frule {

struct induced_rule : reduct {
    // gfrc/bsrc: cover degree at selection time.
    // lem2/vcdomle: number of training instances the rule covers.
    std::size_t cover_degree = 0;

    bool operator==(const induced_rule&) const = default;
};

struct rule_set {
    std::vector<induced_rule> rules;
    double alpha = 0.0;

    std::size_t size() const noexcept { return rules.size(); }
    bool empty() const noexcept { return rules.empty(); }
    bool operator==(const rule_set&) const = default;
};

inline rule_set make_rule_set(const std::vector<reduct>& reducts, double alpha) {
    rule_set pool;
    pool.alpha = alpha;
    pool.rules.reserve(reducts.size());
    for (const auto& r : reducts) {
        pool.rules.push_back(induced_rule{r, 0});
    }
    return pool;
}

enum class extractor { gfrc, lem2, vcdomle, bsrc };

inline std::string_view to_string(extractor e) {
    switch (e) {
    case extractor::gfrc: return "gfrc";
    case extractor::lem2: return "lem2";
    case extractor::vcdomle: return "vcdomle";
    case extractor::bsrc: return "bsrc";
    }
    return "unknown";
}

inline extractor parse_extractor(std::string_view name) {
    if (name == "gfrc") return extractor::gfrc;
    if (name == "lem2") return extractor::lem2;
    if (name == "vcdomle" || name == "vc-domle") return extractor::vcdomle;
    if (name == "bsrc") return extractor::bsrc;
    throw argument_error("unknown extractor '" + std::string(name) +
                         "' (expected gfrc, lem2, vcdomle or bsrc)");
}

// R_B between the rule's stored values and instance y of `table`.
inline double rule_similarity(const reduct& rule, const decision_table& table, instance_index y) {
    double s = 1.0;
    for (std::size_t k = 0; k < rule.attributes.size(); ++k) {
        s = std::min(s, ops::similarity(rule.values[k], table.value(y, rule.attributes[k])));
    }
    return s;
}

inline bool rule_covers_instance(const reduct& rule, const decision_table& table, instance_index y) {
    table.check_instance(y);
    if (table.label(y) != rule.label) {
        return false;
    }
    return ops::discernibility(rule_similarity(rule, table, y), rule.alpha) < rule.radius;
}

inline bool rule_covers_rule(const reduct& r, const reduct& s, const decision_table& table) {
    return rule_covers_instance(r, table, s.owner);
}

// Number of rules in `pool` covered by `rule`, itself included.
inline std::size_t cover_degree_rules(const reduct& rule, const rule_set& pool, const decision_table& table) {
    return static_cast<std::size_t>(std::count_if(pool.rules.begin(), pool.rules.end(), [&](const auto& s) {
        return rule_covers_rule(rule, s, table);
    }));
}

// Training instances covered by each rule, ascending.
inline std::vector<std::vector<instance_index>> instance_covers(const rule_set& pool, const decision_table& table,
                                                                std::size_t threads = 1) {
    std::vector<std::vector<instance_index>> covers(pool.size());
    parallel_for(pool.size(), threads, [&](std::size_t i) {
        const auto& rule = pool.rules[i];
        for (std::size_t y = 0; y < table.size(); ++y) {
            if (table.label(y) == rule.label &&
                ops::discernibility(rule_similarity(rule, table, y), rule.alpha) < rule.radius) {
                covers[i].push_back(y);
            }
        }
    });
    return covers;
}

namespace detail {

inline void check_pool(const rule_set& pool, const decision_table& table) {
    if (pool.empty()) {
        throw argument_error("rule pool is empty");
    }
    std::vector<bool> seen(table.size(), false);
    for (const auto& r : pool.rules) {
        table.check_instance(r.owner);
        if (seen[r.owner]) {
            throw argument_error("rule pool has two rules for instance " + std::to_string(r.owner));
        }
        seen[r.owner] = true;
    }
}

// Positions of pool rules in ascending owner order.
inline std::vector<std::size_t> owner_order(const rule_set& pool) {
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return pool.rules[a].owner < pool.rules[b].owner; });
    return order;
}

// rule_covers[i]: positions of pool rules whose generator rule i covers.
inline std::vector<std::vector<std::size_t>> rule_cover_lists(const rule_set& pool,
                                                              const std::vector<std::vector<instance_index>>& covers,
                                                              std::size_t table_size) {
    constexpr auto none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> position_of(table_size, none);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        position_of[pool.rules[i].owner] = i;
    }
    std::vector<std::vector<std::size_t>> out(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        for (auto y : covers[i]) {
            if (position_of[y] != none) {
                out[i].push_back(position_of[y]);
            }
        }
    }
    return out;
}

} // namespace detail

// Forward selection: repeatedly take the rule with maximum cover degree
// (ties: lowest owner), drop every rule it covers, and recount degrees over
// the rules still in the pool.
inline rule_set extract_gfrc(const rule_set& pool, const decision_table& table, std::size_t threads = 1) {
    detail::check_pool(pool, table);
    const auto covers = instance_covers(pool, table, threads);
    const auto covers_rule = detail::rule_cover_lists(pool, covers, table.size());
    std::vector<std::vector<std::size_t>> covered_by(pool.size());
    std::vector<std::size_t> degree(pool.size(), 0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        degree[i] = covers_rule[i].size();
        for (auto j : covers_rule[i]) {
            covered_by[j].push_back(i);
        }
    }
    const auto order = detail::owner_order(pool);
    std::vector<bool> alive(pool.size(), true);
    std::size_t remaining = pool.size();

    auto remove = [&](std::size_t j) {
        if (!alive[j]) {
            return;
        }
        alive[j] = false;
        --remaining;
        for (auto i : covered_by[j]) {
            --degree[i];
        }
    };

    rule_set out;
    out.alpha = pool.alpha;
    while (remaining > 0) {
        std::size_t best = pool.size();
        for (auto i : order) {
            if (alive[i] && (best == pool.size() || degree[i] > degree[best])) {
                best = i;
            }
        }
        induced_rule chosen = pool.rules[best];
        chosen.cover_degree = degree[best];
        out.rules.push_back(std::move(chosen));
        remove(best);
        for (auto j : covers_rule[best]) {
            remove(j);
        }
    }
    return out;
}

// Single pass in owner order; a rule goes when another rule still present
// covers it.
inline rule_set extract_lem2(const rule_set& pool, const decision_table& table, std::size_t threads = 1) {
    detail::check_pool(pool, table);
    const auto covers = instance_covers(pool, table, threads);
    const auto covers_rule = detail::rule_cover_lists(pool, covers, table.size());
    std::vector<std::vector<std::size_t>> covered_by(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        for (auto j : covers_rule[i]) {
            covered_by[j].push_back(i);
        }
    }
    const auto order = detail::owner_order(pool);
    std::vector<bool> present(pool.size(), true);
    for (auto x : order) {
        const bool covered = std::any_of(covered_by[x].begin(), covered_by[x].end(),
                                         [&](auto y) { return y != x && present[y]; });
        if (covered) {
            present[x] = false;
        }
    }
    rule_set out;
    out.alpha = pool.alpha;
    for (auto i : order) {
        if (present[i]) {
            induced_rule r = pool.rules[i];
            r.cover_degree = covers[i].size();
            out.rules.push_back(std::move(r));
        }
    }
    return out;
}

// Single pass in owner order; a rule goes when every instance it covers is
// also covered by some other surviving rule (a rule covering nothing goes).
inline rule_set extract_vcdomle(const rule_set& pool, const decision_table& table, std::size_t threads = 1) {
    detail::check_pool(pool, table);
    const auto covers = instance_covers(pool, table, threads);
    std::vector<std::size_t> cover_count(table.size(), 0);
    for (const auto& c : covers) {
        for (auto y : c) {
            ++cover_count[y];
        }
    }
    const auto order = detail::owner_order(pool);
    std::vector<bool> present(pool.size(), true);
    for (auto t : order) {
        const bool redundant =
            std::all_of(covers[t].begin(), covers[t].end(), [&](auto y) { return cover_count[y] >= 2; });
        if (redundant) {
            present[t] = false;
            for (auto y : covers[t]) {
                --cover_count[y];
            }
        }
    }
    rule_set out;
    out.alpha = pool.alpha;
    for (auto i : order) {
        if (present[i]) {
            induced_rule r = pool.rules[i];
            r.cover_degree = covers[i].size();
            out.rules.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace frule
