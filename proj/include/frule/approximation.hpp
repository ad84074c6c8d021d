#pragma once

// Fuzzy-rough approximation operators and the consistence degree.

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "decision_table.hpp"
#include "fuzzy.hpp"

namespace frule {

// Ordered list of condition attributes. Order records selection order where
// it matters; set semantics everywhere else.
using attribute_set = std::vector<attribute_index>;

inline bool contains(const attribute_set& set, attribute_index a) {
    return std::find(set.begin(), set.end(), a) != set.end();
}

// R_B(x,y) = min over a in B of R_a(x,y); 1 for the empty set.
inline double subset_similarity_unchecked(const decision_table& table, std::span<const attribute_index> attrs,
                                          instance_index i, instance_index j) noexcept {
    double s = 1.0;
    for (auto a : attrs) {
        s = std::min(s, ops::similarity(table.value(i, a), table.value(j, a)));
    }
    return s;
}

inline degree subset_similarity(const decision_table& table, std::span<const attribute_index> attrs,
                                instance_index i, instance_index j) {
    table.check_instance(i);
    table.check_instance(j);
    for (auto a : attrs) {
        table.check_attribute(a);
    }
    if (!table.normalized()) {
        throw domain_error("similarity requires a normalized table");
    }
    return degree(subset_similarity_unchecked(table, attrs, i, j));
}

inline attribute_set all_attributes(const decision_table& table) {
    attribute_set all(table.attribute_count());
    for (std::size_t a = 0; a < all.size(); ++a) {
        all[a] = a;
    }
    return all;
}

// A fuzzy set over a table's instances.
struct fuzzy_set {
    std::vector<double> membership;

    double operator()(instance_index i) const { return membership[i]; }
    std::size_t size() const noexcept { return membership.size(); }
};

// Crisp indicator [x]_D of x's decision class.
inline fuzzy_set class_indicator(const decision_table& table, instance_index x) {
    table.check_instance(x);
    fuzzy_set s{std::vector<double>(table.size(), 0.0)};
    for (std::size_t u = 0; u < table.size(); ++u) {
        s.membership[u] = table.label(u) == table.label(x) ? 1.0 : 0.0;
    }
    return s;
}

inline fuzzy_set constant_set(const decision_table& table, double value) {
    return fuzzy_set{std::vector<double>(table.size(), value)};
}

inline void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw argument_error("alpha must lie in [0,1]");
    }
}

// Induction paths need alpha in [0,1): at alpha = 1 every pair scores 1 and
// the key-set construction collapses.
inline void check_induction_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw argument_error("alpha must lie in [0,1) for induction, got " + std::to_string(alpha));
    }
}

namespace detail {

inline void check_set(const decision_table& table, const fuzzy_set& set) {
    if (set.size() != table.size()) {
        throw argument_error("fuzzy set length does not match the table");
    }
}

} // namespace detail

// inf_u max{1 - R_B(x,u), A(u)}
inline double lower_classic(const decision_table& table, const attribute_set& attrs, const fuzzy_set& set,
                            instance_index x) {
    detail::check_set(table, set);
    table.check_instance(x);
    double r = 1.0;
    for (std::size_t u = 0; u < table.size(); ++u) {
        r = std::min(r, std::max(1.0 - subset_similarity_unchecked(table, attrs, x, u), set(u)));
    }
    return r;
}

// sup_u min{R_B(x,u), A(u)}
inline double upper_classic(const decision_table& table, const attribute_set& attrs, const fuzzy_set& set,
                            instance_index x) {
    detail::check_set(table, set);
    table.check_instance(x);
    double r = 0.0;
    for (std::size_t u = 0; u < table.size(); ++u) {
        r = std::max(r, std::min(subset_similarity_unchecked(table, attrs, x, u), set(u)));
    }
    return r;
}

// Robust lower approximation: inf over A(u) <= alpha of S(N(R),alpha), meet
// inf over A(u) > alpha of S(N(R),A(u)). Empty infimum is 1.
inline double lower_robust(const decision_table& table, const attribute_set& attrs, const fuzzy_set& set,
                           double alpha, instance_index x) {
    detail::check_set(table, set);
    table.check_instance(x);
    check_alpha(alpha);
    double r = 1.0;
    for (std::size_t u = 0; u < table.size(); ++u) {
        const double nr = ops::negator(subset_similarity_unchecked(table, attrs, x, u));
        const double term = set(u) <= alpha ? ops::t_conorm(nr, alpha) : ops::t_conorm(nr, set(u));
        r = std::min(r, term);
    }
    return r;
}

// Robust upper approximation: sup over A(u) >= N(alpha) of
// sigma(N(R),N(alpha)), join sup over A(u) < N(alpha) of sigma(N(R),A(u)).
// Empty supremum is 0.
inline double upper_robust(const decision_table& table, const attribute_set& attrs, const fuzzy_set& set,
                           double alpha, instance_index x) {
    detail::check_set(table, set);
    table.check_instance(x);
    check_alpha(alpha);
    const double n_alpha = ops::negator(alpha);
    double r = 0.0;
    for (std::size_t u = 0; u < table.size(); ++u) {
        const double nr = ops::negator(subset_similarity_unchecked(table, attrs, x, u));
        const double term =
            set(u) >= n_alpha ? ops::s_residuation(nr, n_alpha) : ops::s_residuation(nr, set(u));
        r = std::max(r, term);
    }
    return r;
}

// Con_{B,alpha}(x) restricted to `universe`: min over heterogeneous y in the
// universe of S(N(R_B(x,y)),alpha); 1 when there is none.
inline double consistence_degree_restricted(const decision_table& table, const attribute_set& attrs,
                                            double alpha, instance_index x,
                                            std::span<const instance_index> universe) {
    table.check_instance(x);
    const auto lx = table.label(x);
    double con = 1.0;
    for (auto y : universe) {
        table.check_instance(y);
        if (table.label(y) != lx) {
            con = std::min(con, ops::discernibility(subset_similarity_unchecked(table, attrs, x, y), alpha));
        }
    }
    return con;
}

// Con_{B,alpha}(x) over the whole table.
inline double consistence_degree(const decision_table& table, const attribute_set& attrs, double alpha,
                                 instance_index x) {
    table.check_instance(x);
    const auto lx = table.label(x);
    double con = 1.0;
    for (std::size_t y = 0; y < table.size(); ++y) {
        if (table.label(y) != lx) {
            con = std::min(con, ops::discernibility(subset_similarity_unchecked(table, attrs, x, y), alpha));
        }
    }
    return con;
}

// Sig1(a, B, x) = Con_{B+a}(x) - Con_B(x). Non-negative in exact arithmetic;
// rounding noise is clamped to 0.
inline double sig1(const decision_table& table, attribute_index a, const attribute_set& attrs,
                   instance_index x, double alpha) {
    table.check_attribute(a);
    if (contains(attrs, a)) {
        throw argument_error("sig1: attribute " + std::to_string(a) + " is already in B");
    }
    attribute_set grown = attrs;
    grown.push_back(a);
    const double d = consistence_degree(table, grown, alpha, x) - consistence_degree(table, attrs, alpha, x);
    return d > 0.0 ? d : 0.0;
}

} // namespace frule
