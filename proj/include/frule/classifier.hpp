#pragma once

// End-to-end rule classifiers: induction + extraction, batch-sampled
// training, prediction and JSON model files.

#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "decision_table.hpp"
#include "extraction.hpp"
#include "format.hpp"
#include "induction.hpp"
#include "random.hpp"

namespace frule {

struct train_config {
    double alpha = 0.0;
    frule::inducer inducer = inducer::acvr;
    frule::extractor extractor = extractor::gfrc;
    double beta = 0.01;      // bsrc batch fraction, (0,1]
    std::size_t delta = 0;   // bsrc cover threshold
    std::uint64_t seed = 42; // bsrc batch sampling
    std::size_t threads = 1; // induction fan-out, 0 = all cores

    bool operator==(const train_config&) const = default;
};

struct rule_classifier {
    rule_set rules; // selection order
    std::vector<value_range> normalization;
    std::vector<std::string> attribute_names;
    std::vector<std::string> class_names;
    train_config config;
};

// Wall time split between the two training phases.
struct train_timing {
    double induction_seconds = 0.0;
    double extraction_seconds = 0.0;
};

namespace detail {

using clock = std::chrono::steady_clock;

inline double seconds_since(clock::time_point t0) {
    return std::chrono::duration<double>(clock::now() - t0).count();
}

inline rule_classifier make_classifier(rule_set rules, const decision_table& table, const train_config& cfg) {
    return rule_classifier{std::move(rules), table.ranges(), table.attribute_names(), table.class_names(), cfg};
}

inline void check_training_table(const decision_table& table) {
    if (table.size() == 0) {
        throw argument_error("cannot train on an empty table");
    }
    if (!table.normalized()) {
        throw domain_error("training requires a normalized table");
    }
}

} // namespace detail

inline rule_classifier train_bsrc(const decision_table& table, const train_config& cfg,
                                  train_timing* timing = nullptr,
                                  std::vector<std::string>* warnings = nullptr);

// Induces one rule per instance and extracts with the configured strategy.
inline rule_classifier train(const decision_table& table, const train_config& cfg, train_timing* timing = nullptr,
                             std::vector<std::string>* warnings = nullptr) {
    if (cfg.extractor == extractor::bsrc) {
        return train_bsrc(table, cfg, timing, warnings);
    }
    detail::check_training_table(table);
    check_induction_alpha(cfg.alpha);

    auto t0 = detail::clock::now();
    const auto reducts = induce_all(table, cfg.alpha, cfg.inducer, {cfg.threads, warnings});
    const double induction = detail::seconds_since(t0);

    t0 = detail::clock::now();
    const auto pool = make_rule_set(reducts, cfg.alpha);
    rule_set selected;
    switch (cfg.extractor) {
    case extractor::gfrc: selected = extract_gfrc(pool, table, cfg.threads); break;
    case extractor::lem2: selected = extract_lem2(pool, table, cfg.threads); break;
    case extractor::vcdomle: selected = extract_vcdomle(pool, table, cfg.threads); break;
    case extractor::bsrc: break;
    }
    if (timing) {
        timing->induction_seconds = induction;
        timing->extraction_seconds = detail::seconds_since(t0);
    }
    return detail::make_classifier(std::move(selected), table, cfg);
}

// Batch-sampled training. Each round samples ceil(beta*|T|) of the
// uncovered instances T, induces their rules into the candidate pool, then
// moves max-cover rules to the output while the best cover degree exceeds
// delta. A rule's cover degree counts the covered items among T and the
// generators of the pool. Rounds continue until T is empty.
inline rule_classifier train_bsrc(const decision_table& table, const train_config& cfg, train_timing* timing,
                                  std::vector<std::string>* warnings) {
    detail::check_training_table(table);
    check_induction_alpha(cfg.alpha);
    if (!(cfg.beta > 0.0 && cfg.beta <= 1.0)) {
        throw argument_error("beta must lie in (0,1]");
    }
    if (cfg.delta > table.size()) {
        throw argument_error("delta must lie in [0, n]");
    }
    if (warnings) {
        warn_inconsistent(table, *warnings);
    }

    const auto n = table.size();
    rng gen(cfg.seed);
    std::vector<instance_index> uncovered(n); // T, ascending
    for (std::size_t i = 0; i < n; ++i) {
        uncovered[i] = i;
    }
    // live[y]: y is in T or is the generator of a rule in the pool
    std::vector<bool> live(n, true);
    std::vector<bool> in_t(n, true);

    struct candidate {
        induced_rule rule;
        std::vector<instance_index> covers;
        std::size_t degree = 0;
        bool active = true;
    };
    std::vector<candidate> pool;
    std::vector<std::vector<std::size_t>> covered_by(n); // pool positions covering y
    std::vector<std::size_t> generator_position(n, std::numeric_limits<std::size_t>::max());

    rule_set omega;
    omega.alpha = cfg.alpha;
    double induction = 0.0;
    const auto start = detail::clock::now();

    auto kill = [&](instance_index y) {
        if (!live[y]) {
            return;
        }
        live[y] = false;
        for (auto p : covered_by[y]) {
            --pool[p].degree;
        }
    };

    while (!uncovered.empty()) {
        const double want = cfg.beta * static_cast<double>(uncovered.size());
        auto batch_size = static_cast<std::size_t>(std::ceil(want * (1.0 - 1e-12)));
        batch_size = std::clamp<std::size_t>(batch_size, 1, uncovered.size());
        gen.sample_front(std::span(uncovered), batch_size);
        std::vector<instance_index> batch(uncovered.begin(), uncovered.begin() + static_cast<std::ptrdiff_t>(batch_size));
        std::sort(batch.begin(), batch.end());
        uncovered.erase(uncovered.begin(), uncovered.begin() + static_cast<std::ptrdiff_t>(batch_size));
        std::sort(uncovered.begin(), uncovered.end());
        for (auto y : batch) {
            in_t[y] = false; // still live as a pool generator
        }

        auto t0 = detail::clock::now();
        std::vector<reduct> fresh(batch.size());
        parallel_for(batch.size(), cfg.threads, [&](std::size_t k) {
            try {
                fresh[k] = induce_one(table, cfg.alpha, cfg.inducer, batch[k]);
            } catch (const error& e) {
                throw instance_error(batch[k], e.what());
            }
        });
        induction += detail::seconds_since(t0);

        rule_set fresh_set = make_rule_set(fresh, cfg.alpha);
        auto fresh_covers = instance_covers(fresh_set, table, cfg.threads);
        for (std::size_t k = 0; k < fresh.size(); ++k) {
            const auto pos = pool.size();
            candidate c{std::move(fresh_set.rules[k]), std::move(fresh_covers[k]), 0, true};
            for (auto y : c.covers) {
                if (live[y]) {
                    ++c.degree;
                }
                covered_by[y].push_back(pos);
            }
            generator_position[c.rule.owner] = pos;
            pool.push_back(std::move(c));
        }

        for (;;) {
            std::size_t best = pool.size();
            for (std::size_t p = 0; p < pool.size(); ++p) {
                if (!pool[p].active) {
                    continue;
                }
                if (best == pool.size() || pool[p].degree > pool[best].degree ||
                    (pool[p].degree == pool[best].degree && pool[p].rule.owner < pool[best].rule.owner)) {
                    best = p;
                }
            }
            if (best == pool.size() || pool[best].degree <= cfg.delta) {
                break;
            }
            induced_rule chosen = pool[best].rule;
            chosen.cover_degree = pool[best].degree;
            omega.rules.push_back(std::move(chosen));

            pool[best].active = false;
            kill(pool[best].rule.owner);
            for (auto y : pool[best].covers) {
                // rules generated by covered instances leave the pool
                const auto g = generator_position[y];
                if (g < pool.size()) {
                    pool[g].active = false;
                }
                in_t[y] = false;
                kill(y);
            }
        }
        std::erase_if(uncovered, [&](auto y) { return !in_t[y]; });
    }

    if (timing) {
        timing->induction_seconds = induction;
        timing->extraction_seconds = detail::seconds_since(start) - induction;
    }
    return detail::make_classifier(std::move(omega), table, cfg);
}

// ---------------------------------------------------------------------------
// Prediction

struct prediction {
    class_id label = 0;
    std::size_t rule_position = 0; // index into classifier.rules
    instance_index matched_owner = 0;
    double matching_degree = 0.0;
    bool clamped = false; // some input fell outside the training range
};

// m(r, z) = R_B(x_r, z) on normalized inputs.
inline double matching_degree(const reduct& rule, std::span<const double> z) {
    double s = 1.0;
    for (std::size_t k = 0; k < rule.attributes.size(); ++k) {
        s = std::min(s, ops::similarity(rule.values[k], z[rule.attributes[k]]));
    }
    return s;
}

// Best-matching rule for an already normalized instance. Ties go to the
// higher cover degree, then to the earlier-selected rule.
inline prediction predict_normalized(const rule_classifier& model, std::span<const double> z) {
    if (z.size() != model.normalization.size()) {
        throw argument_error("instance has " + std::to_string(z.size()) + " values, model expects " +
                             std::to_string(model.normalization.size()));
    }
    if (model.rules.empty()) {
        throw argument_error("model has no rules");
    }
    prediction best;
    bool found = false;
    for (std::size_t p = 0; p < model.rules.size(); ++p) {
        const auto& r = model.rules.rules[p];
        const double m = matching_degree(r, z);
        if (!found || m > best.matching_degree ||
            (m == best.matching_degree && r.cover_degree > model.rules.rules[best.rule_position].cover_degree)) {
            best = prediction{r.label, p, r.owner, m, false};
            found = true;
        }
    }
    return best;
}

// Normalizes a raw instance with the stored ranges (clamping to [0,1]) and
// predicts.
inline prediction predict(const rule_classifier& model, std::span<const double> raw) {
    if (raw.size() != model.normalization.size()) {
        throw argument_error("instance has " + std::to_string(raw.size()) + " values, model expects " +
                             std::to_string(model.normalization.size()));
    }
    std::vector<double> z(raw.size());
    bool clamped = false;
    for (std::size_t a = 0; a < raw.size(); ++a) {
        const double v = model.normalization[a].normalize(raw[a]);
        z[a] = std::clamp(v, 0.0, 1.0);
        clamped = clamped || z[a] != v;
    }
    auto p = predict_normalized(model, z);
    p.clamped = clamped;
    return p;
}

// instance_index,predicted_label,matched_rule_owner,matching_degree
inline void write_prediction_csv_header(std::ostream& out) {
    out << "instance_index,predicted_label,matched_rule_owner,matching_degree\n";
}

inline void write_prediction_csv_row(std::ostream& out, std::size_t index, const rule_classifier& model,
                                     const prediction& p) {
    out << index << ',' << model.class_names.at(p.label) << ',' << p.matched_owner << ','
        << format_real(p.matching_degree) << '\n';
}

// ---------------------------------------------------------------------------
// Model files

inline constexpr int model_version = 1;

inline nlohmann::ordered_json rule_to_json(const induced_rule& r, const std::vector<std::string>& class_names) {
    nlohmann::ordered_json j;
    j["owner"] = r.owner;
    j["attributes"] = r.attributes;
    j["values"] = r.values;
    j["label"] = class_names.at(r.label);
    j["radius"] = r.radius;
    j["cover_degree"] = r.cover_degree;
    return j;
}

inline nlohmann::ordered_json to_json(const rule_classifier& model) {
    nlohmann::ordered_json j;
    j["version"] = model_version;
    j["alpha"] = model.config.alpha;
    j["config"] = {{"inducer", to_string(model.config.inducer)},
                   {"extractor", to_string(model.config.extractor)},
                   {"beta", model.config.beta},
                   {"delta", model.config.delta},
                   {"seed", model.config.seed}};
    auto norm = nlohmann::ordered_json::array();
    for (const auto& r : model.normalization) {
        norm.push_back({r.min, r.max});
    }
    j["normalization"] = std::move(norm);
    j["attribute_names"] = model.attribute_names;
    j["class_names"] = model.class_names;
    auto rules = nlohmann::ordered_json::array();
    for (const auto& r : model.rules.rules) {
        rules.push_back(rule_to_json(r, model.class_names));
    }
    j["rules"] = std::move(rules);
    return j;
}

namespace detail {

// Reads `key` from object `j`, naming the full field path on failure.
template <class T>
T field(const nlohmann::json& j, const std::string& key, const std::string& path) {
    const auto where = path.empty() ? key : path + "." + key;
    if (!j.is_object() || !j.contains(key)) {
        throw format_error("model file: missing field '" + where + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw format_error("model file: field '" + where + "' has the wrong type");
    }
}

inline const nlohmann::json& array_field(const nlohmann::json& j, const std::string& key, const std::string& path) {
    const auto where = path.empty() ? key : path + "." + key;
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_array()) {
        throw format_error("model file: field '" + where + "' must be an array");
    }
    return j.at(key);
}

} // namespace detail

inline rule_classifier from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw format_error("model file: top level must be an object");
    }
    const auto version = detail::field<int>(j, "version", "");
    if (version != model_version) {
        throw version_error("model file: unsupported schema version " + std::to_string(version) + " (expected " +
                            std::to_string(model_version) + ")");
    }
    rule_classifier model;
    model.config.alpha = detail::field<double>(j, "alpha", "");
    if (!j.contains("config") || !j.at("config").is_object()) {
        throw format_error("model file: missing field 'config'");
    }
    const auto& cfg = j.at("config");
    try {
        model.config.inducer = parse_inducer(detail::field<std::string>(cfg, "inducer", "config"));
        model.config.extractor = parse_extractor(detail::field<std::string>(cfg, "extractor", "config"));
    } catch (const argument_error& e) {
        throw format_error(std::string("model file: ") + e.what());
    }
    model.config.beta = detail::field<double>(cfg, "beta", "config");
    model.config.delta = detail::field<std::size_t>(cfg, "delta", "config");
    model.config.seed = detail::field<std::uint64_t>(cfg, "seed", "config");

    const auto& norm = detail::array_field(j, "normalization", "");
    for (std::size_t a = 0; a < norm.size(); ++a) {
        const auto& pair = norm[a];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
            throw format_error("model file: field 'normalization[" + std::to_string(a) + "]' must be [min,max]");
        }
        model.normalization.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    model.attribute_names = detail::field<std::vector<std::string>>(j, "attribute_names", "");
    model.class_names = detail::field<std::vector<std::string>>(j, "class_names", "");
    if (model.attribute_names.size() != model.normalization.size()) {
        throw format_error("model file: 'attribute_names' and 'normalization' lengths differ");
    }

    const auto& rules = detail::array_field(j, "rules", "");
    model.rules.alpha = model.config.alpha;
    for (std::size_t p = 0; p < rules.size(); ++p) {
        const auto path = "rules[" + std::to_string(p) + "]";
        const auto& rj = rules[p];
        induced_rule r;
        r.owner = detail::field<std::size_t>(rj, "owner", path);
        r.attributes = detail::field<attribute_set>(rj, "attributes", path);
        r.values = detail::field<std::vector<double>>(rj, "values", path);
        const auto label = detail::field<std::string>(rj, "label", path);
        const auto it = std::find(model.class_names.begin(), model.class_names.end(), label);
        if (it == model.class_names.end()) {
            throw format_error("model file: field '" + path + ".label' names an unknown class '" + label + "'");
        }
        r.label = static_cast<class_id>(it - model.class_names.begin());
        r.radius = detail::field<double>(rj, "radius", path);
        r.cover_degree = detail::field<std::size_t>(rj, "cover_degree", path);
        r.alpha = model.config.alpha;
        if (r.values.size() != r.attributes.size()) {
            throw format_error("model file: '" + path + "' has mismatched attributes and values");
        }
        for (auto a : r.attributes) {
            if (a >= model.normalization.size()) {
                throw format_error("model file: '" + path + ".attributes' references attribute " +
                                   std::to_string(a) + " beyond the model's " +
                                   std::to_string(model.normalization.size()));
            }
        }
        model.rules.rules.push_back(std::move(r));
    }
    return model;
}

inline void save_model(const rule_classifier& model, std::ostream& out) { out << to_json(model).dump(2) << '\n'; }

inline void save_model(const rule_classifier& model, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw io_error("cannot write '" + path + "'");
    }
    save_model(model, out);
}

inline rule_classifier load_model(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw format_error(std::string("model file is not valid JSON: ") + e.what());
    }
    return from_json(j);
}

inline rule_classifier load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open '" + path + "'");
    }
    return load_model(in);
}

} // namespace frule
