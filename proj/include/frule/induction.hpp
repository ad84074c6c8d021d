#pragma once

// Per-instance attribute-value reduction (rule induction).
//
//  - cvr_reduct:  greedy forward selection on Sig1 over the full universe,
//                 then backward deletion.
//  - acvr_reduct: the same greedy search driven by Sig2 over the key set,
//                 which shrinks as attributes are added. Produces exactly the
//                 reduct cvr_reduct produces.
//  - dvr_reduct:  discernibility-vector set cover, used as a validity oracle.
//
// Ties in every argmax go to the lowest attribute index.

#include <algorithm>
#include <iosfwd>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "approximation.hpp"
#include "decision_table.hpp"
#include "fuzzy.hpp"
#include "parallel.hpp"

namespace frule {

// One induced rule before extraction: the owner's values on the reduct
// attributes imply the owner's label.
struct reduct {
    instance_index owner = 0;
    attribute_set attributes; // selection order
    std::vector<double> values;
    class_id label = 0;
    double radius = 1.0; // Con_{C,alpha}(owner)
    double alpha = 0.0;

    bool operator==(const reduct&) const = default;
};

// Heterogeneous instances of `owner`, split by whether current_b already
// separates them at the consistence threshold.
struct key_state {
    instance_index owner = 0;
    attribute_set current_b;
    std::vector<instance_index> discernible; // ascending
    std::vector<instance_index> key;         // ascending
    double con_full = 1.0;
};

// c_j for every heterogeneous x_j of the owner.
struct discernibility_vector {
    struct entry {
        instance_index other;
        attribute_set attributes; // ascending
    };
    instance_index owner = 0;
    double con_full = 1.0;
    std::vector<entry> entries;
};

enum class inducer { cvr, acvr, dvr };

inline std::string_view to_string(inducer m) {
    switch (m) {
    case inducer::cvr: return "cvr";
    case inducer::acvr: return "a-cvr";
    case inducer::dvr: return "dvr";
    }
    return "unknown";
}

inline inducer parse_inducer(std::string_view name) {
    if (name == "cvr") return inducer::cvr;
    if (name == "a-cvr" || name == "acvr") return inducer::acvr;
    if (name == "dvr") return inducer::dvr;
    throw argument_error("unknown inducer '" + std::string(name) + "' (expected cvr, a-cvr or dvr)");
}

namespace detail {

inline double positive_part(double v) noexcept { return v > 0.0 ? v : 0.0; }

// Heterogeneous instances of x and Con_{C,alpha}(x).
struct instance_context {
    const decision_table& table;
    instance_index x;
    double alpha;
    std::vector<instance_index> hetero;
    double con_full = 1.0;

    instance_context(const decision_table& t, instance_index owner, double a)
        : table(t), x(owner), alpha(a) {
        t.check_instance(owner);
        if (!t.normalized()) {
            throw domain_error("induction requires a normalized table");
        }
        check_induction_alpha(a);
        const auto lx = t.label(owner);
        for (std::size_t y = 0; y < t.size(); ++y) {
            if (t.label(y) != lx) {
                hetero.push_back(y);
            }
        }
        const auto all = all_attributes(t);
        for (auto y : hetero) {
            con_full = std::min(con_full,
                                ops::discernibility(subset_similarity_unchecked(t, all, owner, y), alpha));
        }
    }

    double con_of(const attribute_set& attrs) const {
        double con = 1.0;
        for (auto y : hetero) {
            con = std::min(con, ops::discernibility(subset_similarity_unchecked(table, attrs, x, y), alpha));
        }
        return con;
    }

    // min over `members` (positions into `sims`) of S(N(min(sim, R_a))).
    double con_with(attribute_index a, std::span<const instance_index> members,
                    std::span<const double> sims) const {
        const auto col = table.column(a);
        const double xv = col[x];
        double con = 1.0;
        for (std::size_t k = 0; k < members.size(); ++k) {
            const double s = std::min(sims[k], ops::similarity(xv, col[members[k]]));
            con = std::min(con, ops::discernibility(s, alpha));
        }
        return con;
    }

    // Con_B(x) == Con_C(x). Con_B <= Con_C for every B, so the scan stops at
    // the first heterogeneous instance below Con_C.
    bool preserves_con(const attribute_set& attrs) const {
        for (auto y : hetero) {
            if (ops::discernibility(subset_similarity_unchecked(table, attrs, x, y), alpha) < con_full) {
                return false;
            }
        }
        return true;
    }

    // Backward phase shared by both greedy algorithms: scan the selected
    // attributes in selection order and drop each one whose removal keeps
    // Con at Con_C.
    attribute_set backward_delete(attribute_set b) const {
        const attribute_set selected = b;
        for (auto candidate : selected) {
            attribute_set without;
            without.reserve(b.size());
            for (auto a : b) {
                if (a != candidate) {
                    without.push_back(a);
                }
            }
            if (preserves_con(without)) {
                b = std::move(without);
            }
        }
        return b;
    }

    reduct make_reduct(attribute_set attrs) const {
        reduct r;
        r.owner = x;
        r.values.reserve(attrs.size());
        for (auto a : attrs) {
            r.values.push_back(table.value(x, a));
        }
        r.attributes = std::move(attrs);
        r.label = table.label(x);
        r.radius = con_full;
        r.alpha = alpha;
        return r;
    }
};

inline attribute_set remaining_attributes(const decision_table& table, const attribute_set& b) {
    attribute_set lef;
    for (std::size_t a = 0; a < table.attribute_count(); ++a) {
        if (!contains(b, a)) {
            lef.push_back(a);
        }
    }
    return lef;
}

} // namespace detail

// ---------------------------------------------------------------------------
// CVR

inline reduct cvr_reduct(const decision_table& table, double alpha, instance_index x) {
    const detail::instance_context ctx(table, x, alpha);

    // Running R_B(x,y) for every heterogeneous y.
    std::vector<double> sims(ctx.hetero.size(), 1.0);
    auto current_con = [&] {
        double con = 1.0;
        for (double s : sims) {
            con = std::min(con, ops::discernibility(s, alpha));
        }
        return con;
    };

    attribute_set b;
    attribute_set lef = all_attributes(table);
    double con_b = current_con();
    while (con_b < ctx.con_full) {
        std::size_t best = 0;
        double best_sig = -1.0;
        for (std::size_t k = 0; k < lef.size(); ++k) {
            const double sig = detail::positive_part(ctx.con_with(lef[k], ctx.hetero, sims) - con_b);
            if (sig > best_sig) {
                best_sig = sig;
                best = k;
            }
        }
        const auto chosen = lef[best];
        b.push_back(chosen);
        lef.erase(lef.begin() + static_cast<std::ptrdiff_t>(best));
        const auto col = table.column(chosen);
        for (std::size_t k = 0; k < sims.size(); ++k) {
            sims[k] = std::min(sims[k], ops::similarity(col[x], col[ctx.hetero[k]]));
        }
        con_b = current_con();
    }
    return ctx.make_reduct(ctx.backward_delete(std::move(b)));
}

// ---------------------------------------------------------------------------
// Key sets

inline key_state build_key_state(const decision_table& table, double alpha, instance_index x,
                                 const attribute_set& b) {
    for (auto a : b) {
        table.check_attribute(a);
    }
    const detail::instance_context ctx(table, x, alpha);
    key_state st;
    st.owner = x;
    st.current_b = b;
    st.con_full = ctx.con_full;
    for (auto y : ctx.hetero) {
        const double score = ops::discernibility(subset_similarity_unchecked(table, b, x, y), alpha);
        (score >= ctx.con_full ? st.discernible : st.key).push_back(y);
    }
    return st;
}

// Sig2(a, B, x, KEY_B(x)), evaluated on U - Dis_B(x). Homogeneous instances
// never enter a consistence minimum, so only the key set is scanned.
inline double sig2(const decision_table& table, attribute_index a, const attribute_set& b, instance_index x,
                   const key_state& state, double alpha) {
    table.check_attribute(a);
    if (contains(b, a)) {
        throw argument_error("sig2: attribute " + std::to_string(a) + " is already in B");
    }
    if (state.owner != x || state.current_b != b) {
        throw argument_error("sig2: key state does not belong to (x, B)");
    }
    if (state.key.empty()) {
        return 0.0;
    }
    attribute_set grown = b;
    grown.push_back(a);
    const double con_b = consistence_degree_restricted(table, b, alpha, x, state.key);
    const double con_grown = consistence_degree_restricted(table, grown, alpha, x, state.key);
    if (con_grown >= state.con_full) {
        // KEY_{B+a} is empty
        return detail::positive_part(state.con_full - con_b);
    }
    return detail::positive_part(con_grown - con_b);
}

// ---------------------------------------------------------------------------
// A-CVR

struct no_observer {
    void operator()(const key_state&) const noexcept {}
};

// `observe` sees the key state after initialization and after every
// selection; tests use it to check the monotonicity of Dis/KEY.
template <class Observer = no_observer>
reduct acvr_reduct(const decision_table& table, double alpha, instance_index x, Observer&& observe = {}) {
    const detail::instance_context ctx(table, x, alpha);

    // Key members and their running R_B(x,y); with B empty every score is
    // S(0,alpha) = alpha.
    std::vector<instance_index> key;
    std::vector<double> sims;
    std::vector<instance_index> discernible;
    for (auto y : ctx.hetero) {
        if (ops::discernibility(1.0, alpha) >= ctx.con_full) {
            discernible.push_back(y);
        } else {
            key.push_back(y);
            sims.push_back(1.0);
        }
    }

    attribute_set b;
    attribute_set lef = all_attributes(table);

    constexpr bool observed = !std::is_same_v<std::decay_t<Observer>, no_observer>;
    auto report = [&] {
        if constexpr (observed) {
            key_state st{x, b, discernible, key, ctx.con_full};
            std::sort(st.discernible.begin(), st.discernible.end());
            observe(static_cast<const key_state&>(st));
        }
    };
    report();

    while (!key.empty()) {
        double con_b = 1.0;
        for (double s : sims) {
            con_b = std::min(con_b, ops::discernibility(s, alpha));
        }
        std::size_t best = 0;
        double best_sig = -1.0;
        for (std::size_t k = 0; k < lef.size(); ++k) {
            const double con_grown = ctx.con_with(lef[k], key, sims);
            const double sig = con_grown >= ctx.con_full ? detail::positive_part(ctx.con_full - con_b)
                                                          : detail::positive_part(con_grown - con_b);
            if (sig > best_sig) {
                best_sig = sig;
                best = k;
            }
        }
        const auto chosen = lef[best];
        b.push_back(chosen);
        lef.erase(lef.begin() + static_cast<std::ptrdiff_t>(best));

        // Only key members are re-tested; discernible ones stay discernible.
        const auto col = table.column(chosen);
        std::size_t kept = 0;
        for (std::size_t k = 0; k < key.size(); ++k) {
            const double s = std::min(sims[k], ops::similarity(col[x], col[key[k]]));
            if (ops::discernibility(s, alpha) >= ctx.con_full) {
                if constexpr (observed) {
                    discernible.push_back(key[k]);
                }
            } else {
                key[kept] = key[k];
                sims[kept] = s;
                ++kept;
            }
        }
        key.resize(kept);
        sims.resize(kept);
        report();
    }
    return ctx.make_reduct(ctx.backward_delete(std::move(b)));
}

// ---------------------------------------------------------------------------
// DVR

// An attribute enters c_j when sigma(N(R_a), Con_C) <= alpha. By the S/sigma
// adjunction this is S(N(R_a), alpha) >= Con_C, which is the form evaluated
// here so that membership agrees bit-for-bit with the consistence degree.
inline discernibility_vector build_discernibility_vector(const decision_table& table, double alpha,
                                                         instance_index x) {
    const detail::instance_context ctx(table, x, alpha);
    discernibility_vector dv;
    dv.owner = x;
    dv.con_full = ctx.con_full;
    dv.entries.reserve(ctx.hetero.size());
    for (auto y : ctx.hetero) {
        discernibility_vector::entry e{y, {}};
        for (std::size_t a = 0; a < table.attribute_count(); ++a) {
            const double r = ops::similarity(table.value(x, a), table.value(y, a));
            if (ops::discernibility(r, alpha) >= ctx.con_full) {
                e.attributes.push_back(a);
            }
        }
        dv.entries.push_back(std::move(e));
    }
    return dv;
}

inline reduct dvr_reduct(const decision_table& table, double alpha, instance_index x) {
    const detail::instance_context ctx(table, x, alpha);
    const auto dv = build_discernibility_vector(table, alpha, x);
    const auto m = table.attribute_count();

    std::vector<bool> in_core(m, false);
    for (const auto& e : dv.entries) {
        if (e.attributes.size() == 1) {
            in_core[e.attributes.front()] = true;
        }
    }
    attribute_set b;
    for (std::size_t a = 0; a < m; ++a) {
        if (in_core[a]) {
            b.push_back(a);
        }
    }

    auto hits = [](const attribute_set& entry, const std::vector<bool>& chosen) {
        return std::any_of(entry.begin(), entry.end(), [&](auto a) { return chosen[a]; });
    };
    std::vector<const attribute_set*> open;
    for (const auto& e : dv.entries) {
        if (!e.attributes.empty() && !hits(e.attributes, in_core)) {
            open.push_back(&e.attributes);
        }
    }
    std::vector<bool> chosen = in_core;
    while (!open.empty()) {
        std::vector<std::size_t> count(m, 0);
        for (const auto* entry : open) {
            for (auto a : *entry) {
                ++count[a];
            }
        }
        std::size_t best = m;
        for (std::size_t a = 0; a < m; ++a) {
            if (!chosen[a] && (best == m || count[a] > count[best])) {
                best = a;
            }
        }
        chosen[best] = true;
        b.push_back(best);
        std::erase_if(open, [&](const attribute_set* entry) { return contains(*entry, best); });
    }
    return ctx.make_reduct(ctx.backward_delete(std::move(b)));
}

// ---------------------------------------------------------------------------
// Whole-table induction

struct induction_options {
    std::size_t threads = 1; // 0 = all cores
    std::vector<std::string>* warnings = nullptr;
};

// Error raised while inducing one instance.
class instance_error : public error {
public:
    instance_error(instance_index i, const std::string& what)
        : error("instance " + std::to_string(i) + ": " + what), index_(i) {}
    instance_index index() const noexcept { return index_; }

private:
    instance_index index_;
};

inline reduct induce_one(const decision_table& table, double alpha, inducer method, instance_index x) {
    switch (method) {
    case inducer::cvr: return cvr_reduct(table, alpha, x);
    case inducer::acvr: return acvr_reduct(table, alpha, x);
    case inducer::dvr: return dvr_reduct(table, alpha, x);
    }
    throw argument_error("unknown inducer");
}

// Instances sharing a condition row with a differently labelled instance
// have Con = alpha and produce unusable rules; they are reported, not dropped.
inline void warn_inconsistent(const decision_table& table, std::vector<std::string>& warnings) {
    for (const auto& group : inconsistent_groups(table)) {
        std::string msg = "inconsistent instances (identical condition values, different labels):";
        for (auto i : group) {
            msg += ' ';
            msg += std::to_string(i);
        }
        msg += "; consider dropping inconsistent instances before induction";
        warnings.push_back(std::move(msg));
    }
}

// One reduct per instance, in instance order.
inline std::vector<reduct> induce_all(const decision_table& table, double alpha, inducer method,
                                      const induction_options& opts = {}) {
    check_induction_alpha(alpha);
    if (!table.normalized()) {
        throw domain_error("induction requires a normalized table");
    }
    if (opts.warnings) {
        warn_inconsistent(table, *opts.warnings);
    }
    std::vector<reduct> out(table.size());
    parallel_for(table.size(), opts.threads, [&](std::size_t i) {
        try {
            out[i] = induce_one(table, alpha, method, i);
        } catch (const error& e) {
            throw instance_error(i, e.what());
        }
    });
    return out;
}

// {"instance":i,"attributes":[..],"values":[..],"label":"..","radius":r}
inline nlohmann::ordered_json to_json(const reduct& r, const decision_table& table) {
    nlohmann::ordered_json j;
    j["instance"] = r.owner;
    j["attributes"] = r.attributes;
    j["values"] = r.values;
    j["label"] = table.class_names().at(r.label);
    j["radius"] = r.radius;
    return j;
}

inline void write_jsonl(std::ostream& out, const std::vector<reduct>& reducts, const decision_table& table) {
    for (const auto& r : reducts) {
        out << to_json(r, table).dump() << '\n';
    }
}

} // namespace frule
