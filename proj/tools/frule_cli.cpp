// frule: command-line front end for rule induction, training, prediction,
// cross-validation and scaling benchmarks.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <frule/frule.hpp>

namespace {

using namespace frule;

constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_internal = 3;

struct input_flags {
    std::string path;
    bool no_header = false;
    std::string label_column = "last";
    bool drop_inconsistent = false;

    csv_options csv() const { return {!no_header, column_selector::parse(label_column)}; }
};

struct model_flags {
    double alpha = 0.0;
    std::string inducer = "a-cvr";
    std::string extractor = "gfrc";
    double beta = 0.01;
    std::size_t delta = 0;

    train_config config(std::uint64_t seed, std::size_t threads) const {
        train_config cfg;
        cfg.alpha = alpha;
        cfg.inducer = parse_inducer(inducer);
        cfg.extractor = parse_extractor(extractor);
        cfg.beta = beta;
        cfg.delta = delta;
        cfg.seed = seed;
        cfg.threads = threads;
        return cfg;
    }
};

struct common_flags {
    std::uint64_t seed = 42;
    std::size_t threads = 0;
};

void add_input(CLI::App* cmd, input_flags& in) {
    cmd->add_option("-i,--input", in.path, "CSV file with one instance per row")->required();
    cmd->add_flag("--no-header", in.no_header, "The first CSV row is data, not a header");
    cmd->add_option("--label-column", in.label_column, "Label column: 'last', a 0-based index or a header name")
        ->capture_default_str();
    cmd->add_flag("--drop-inconsistent", in.drop_inconsistent,
                  "Remove instances sharing condition values with a differently labelled instance");
}

void add_model(CLI::App* cmd, model_flags& m, bool with_extractor) {
    cmd->add_option("--alpha", m.alpha, "Noise tolerance alpha in [0,1)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--inducer", m.inducer, "Rule inducer: cvr, a-cvr or dvr")
        ->check(CLI::IsMember({"cvr", "a-cvr", "dvr"}))
        ->capture_default_str();
    if (with_extractor) {
        cmd->add_option("--extractor", m.extractor, "Rule extractor: gfrc, lem2, vcdomle or bsrc")
            ->check(CLI::IsMember({"gfrc", "lem2", "vcdomle", "bsrc"}))
            ->capture_default_str();
        cmd->add_option("--beta", m.beta, "Batch fraction in (0,1] for bsrc")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        cmd->add_option("--delta", m.delta, "Cover-degree threshold for bsrc")->capture_default_str();
    }
}

void add_common(CLI::App* cmd, common_flags& c) {
    cmd->add_option("--seed", c.seed, "Seed for folds, subgroups and batch sampling")
        ->envname("FRULE_SEED")
        ->capture_default_str();
    cmd->add_option("--threads", c.threads, "Worker threads for induction (0 = all cores)")
        ->envname("FRULE_THREADS")
        ->capture_default_str();
}

// Writes to `path`, or to standard output when `path` is empty. Files are
// truncated first.
template <class Fn>
void write_output(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw io_error("cannot write '" + path + "'");
    }
    fn(out);
    if (!out) {
        throw io_error("error while writing '" + path + "'");
    }
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) {
        std::cerr << "warning: " << w << '\n';
    }
}

decision_table load_raw(const input_flags& in) {
    auto table = load_csv(in.path, in.csv());
    if (in.drop_inconsistent) {
        auto filtered = drop_inconsistent(table);
        if (filtered.removed > 0) {
            std::cerr << "dropped " << filtered.removed << " inconsistent instance(s)\n";
        }
        table = std::move(filtered.table);
    } else if (!inconsistent_groups(table).empty()) {
        std::cerr << "WARNING: " << inconsistent_groups(table).size()
                  << " group(s) of instances share condition values but differ in label; rerun with "
                     "--drop-inconsistent to remove them\n";
    }
    return table;
}

std::string dataset_name(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

int run_induce(const input_flags& in, const model_flags& m, const common_flags& c, const std::string& out) {
    const auto table = normalize_min_max(load_raw(in));
    const auto reducts = induce_all(table, m.alpha, parse_inducer(m.inducer), {resolve_threads(c.threads), nullptr});
    write_output(out, [&](std::ostream& os) { write_jsonl(os, reducts, table); });
    return 0;
}

int run_train(const input_flags& in, const model_flags& m, const common_flags& c, const std::string& out) {
    const auto table = normalize_min_max(load_raw(in));
    std::vector<std::string> warnings;
    const auto model = train(table, m.config(c.seed, resolve_threads(c.threads)), nullptr, &warnings);
    print_warnings(warnings);
    write_output(out, [&](std::ostream& os) { save_model(model, os); });
    std::cerr << "trained " << model.rules.size() << " rule(s) from " << table.size() << " instance(s)\n";
    return 0;
}

// Prediction input: labelled CSV in the training layout, or with --unlabeled
// every column is a condition attribute.
struct prediction_input {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels; // empty when unlabeled
};

prediction_input read_prediction_input(const input_flags& in, bool unlabeled) {
    prediction_input out;
    if (!unlabeled) {
        const auto table = load_csv(in.path, in.csv());
        out.rows = table.rows();
        for (auto l : table.labels()) {
            out.labels.push_back(table.class_names()[l]);
        }
        return out;
    }
    std::ifstream file(in.path);
    if (!file) {
        throw io_error("cannot open '" + in.path + "'");
    }
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = !in.no_header;
    while (std::getline(file, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        if (header_pending) {
            header_pending = false;
            continue;
        }
        std::vector<double> row;
        const auto cells = detail::split_csv_line(line);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto v = detail::parse_real(cells[c]);
            if (!v || !std::isfinite(*v)) {
                throw parse_error("cannot parse '" + std::string(cells[c]) + "' as a real at row " +
                                      std::to_string(line_no) + ", column " + std::to_string(c + 1),
                                  line_no, c + 1);
            }
            row.push_back(*v);
        }
        out.rows.push_back(std::move(row));
    }
    if (out.rows.empty()) {
        throw empty_input_error("prediction input contains no data rows");
    }
    return out;
}

int run_predict(const input_flags& in, const std::string& model_path, bool unlabeled, const std::string& out) {
    const auto model = load_model(model_path);
    const auto input = read_prediction_input(in, unlabeled);
    std::size_t clamped = 0;
    std::size_t correct = 0;
    std::vector<prediction> predictions;
    predictions.reserve(input.rows.size());
    for (std::size_t i = 0; i < input.rows.size(); ++i) {
        if (input.rows[i].size() != model.normalization.size()) {
            throw argument_error("row " + std::to_string(i) + " has " + std::to_string(input.rows[i].size()) +
                                 " attribute values, model expects " + std::to_string(model.normalization.size()));
        }
        predictions.push_back(predict(model, input.rows[i]));
        clamped += predictions.back().clamped;
        if (!input.labels.empty() && model.class_names[predictions.back().label] == input.labels[i]) {
            ++correct;
        }
    }
    write_output(out, [&](std::ostream& os) {
        write_prediction_csv_header(os);
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            write_prediction_csv_row(os, i, model, predictions[i]);
        }
    });
    if (clamped > 0) {
        std::cerr << "warning: " << clamped
                  << " instance(s) had values outside the training range and were clamped\n";
    }
    if (!input.labels.empty()) {
        std::cerr << "accuracy " << format_real(static_cast<double>(correct) / static_cast<double>(input.rows.size()))
                  << " (" << correct << "/" << input.rows.size() << ")\n";
    }
    return 0;
}

struct eval_flags {
    std::size_t folds = 5;
    bool stratified = true;
    bool global_normalization = false;
    std::string out;
    std::string json;
    std::string folds_out;
};

int run_eval(const input_flags& in, const model_flags& m, const common_flags& c, const eval_flags& e) {
    const auto raw = load_raw(in);
    cv_options opts;
    opts.folds = e.folds;
    opts.seed = c.seed;
    opts.stratified = e.stratified;
    opts.global_normalization = e.global_normalization;
    const auto cfg = m.config(c.seed, resolve_threads(c.threads));
    const auto report = cross_validate(raw, cfg, opts);
    print_warnings(report.warnings);

    const std::string method = std::string(to_string(cfg.inducer)) + "+" + std::string(to_string(cfg.extractor));
    write_output(e.out, [&](std::ostream& os) {
        write_report_csv_header(os);
        write_report_csv(os, dataset_name(in.path), method, report);
    });
    if (!e.json.empty()) {
        write_output(e.json, [&](std::ostream& os) { os << to_json(report).dump(2) << '\n'; });
    }
    if (!e.folds_out.empty()) {
        const auto folds = split_folds(raw, opts.folds, opts.seed, opts.stratified);
        write_output(e.folds_out, [&](std::ostream& os) { write_fold_csv(os, folds); });
    }
    std::cerr << "accuracy " << format_real(report.mean) << " +- " << format_real(report.std) << " over "
              << report.accuracies.size() << " folds\n";
    return 0;
}

struct bench_flags {
    std::string methods = "cvrc,a-cvrc";
    std::size_t subgroups = 10;
    bool attribute_scaling = false;
    bool phases = false;
    std::string out;
    std::string json;
};

int run_bench(const input_flags& in, const model_flags& m, const common_flags& c, const bench_flags& b) {
    const auto methods = split_list(b.methods);
    if (methods.empty()) {
        throw CLI::ValidationError("--methods", "empty method list");
    }
    for (const auto& name : methods) {
        try {
            parse_method(name);
        } catch (const argument_error& e) {
            throw CLI::ValidationError("--methods", e.what());
        }
    }
    const auto table = normalize_min_max(load_raw(in));
    benchmark_options opts;
    opts.groups = b.subgroups;
    opts.seed = c.seed;
    // Both members of every compared pair run with the same thread count.
    opts.threads = resolve_threads(c.threads);
    opts.attribute_scaling = b.attribute_scaling;
    opts.base = m.config(c.seed, opts.threads);
    std::cerr << "benchmarking " << methods.size() << " method(s) on " << b.subgroups << " prefix(es) of "
              << table.size() << " instance(s)\n";
    const auto report = benchmark_scaling(table, methods, opts);
    write_output(b.out, [&](std::ostream& os) {
        write_report_csv_header(os);
        write_report_csv(os, dataset_name(in.path), report, b.phases);
    });
    if (!b.json.empty()) {
        write_output(b.json, [&](std::ostream& os) { os << to_json(report).dump(2) << '\n'; });
    }
    for (const auto& s : report.speedups) {
        std::cerr << "n=" << s.instances << " m=" << s.attributes << ' ' << s.baseline << '/' << s.accelerated
                  << " induction speedup " << format_real(s.induction_ratio) << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuzzy-rough rule induction and rule-based classification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "frule 1.0.0");

    input_flags in;
    model_flags model;
    common_flags common;
    std::string out;

    auto* induce = app.add_subcommand("induce", "Induce one rule (value reduct) per instance as JSON lines");
    add_input(induce, in);
    add_model(induce, model, false);
    add_common(induce, common);
    induce->add_option("-o,--out", out, "Output file (default: standard output)");

    auto* train_cmd = app.add_subcommand("train", "Train a rule classifier and save it as JSON");
    add_input(train_cmd, in);
    add_model(train_cmd, model, true);
    add_common(train_cmd, common);
    train_cmd->add_option("-o,--out", out, "Model file (default: standard output)");

    std::string model_path;
    bool unlabeled = false;
    auto* predict_cmd = app.add_subcommand("predict", "Predict labels with a saved model");
    predict_cmd->add_option("-m,--model", model_path, "Model file written by 'train'")->required();
    add_input(predict_cmd, in);
    predict_cmd->add_flag("--unlabeled", unlabeled, "Every input column is a condition attribute");
    predict_cmd->add_option("-o,--out", out, "Prediction CSV (default: standard output)");

    eval_flags ev;
    auto* eval_cmd = app.add_subcommand("eval", "k-fold cross-validation");
    add_input(eval_cmd, in);
    add_model(eval_cmd, model, true);
    add_common(eval_cmd, common);
    eval_cmd->add_option("--folds", ev.folds, "Number of folds")->capture_default_str();
    eval_cmd->add_flag("--stratified,!--no-stratified", ev.stratified, "Stratify folds by class (default on)");
    eval_cmd->add_flag("--paper-normalization", ev.global_normalization,
                       "Normalize the whole table before splitting instead of per training fold");
    eval_cmd->add_option("-o,--out", ev.out, "Report CSV (default: standard output)");
    eval_cmd->add_option("--json", ev.json, "Also write the full report as JSON");
    eval_cmd->add_option("--folds-out", ev.folds_out, "Write the fold assignment as CSV");

    bench_flags bf;
    auto* bench_cmd = app.add_subcommand("bench", "Time methods on growing prefixes of the data");
    add_input(bench_cmd, in);
    add_model(bench_cmd, model, true);
    add_common(bench_cmd, common);
    bench_cmd->add_option("--methods", bf.methods,
                          "Comma-separated methods: cvrc, a-cvrc, bsrc, a-bsrc, lem2, a-lem2, vcdomle, "
                          "a-vcdomle, gfrc")
        ->capture_default_str();
    bench_cmd->add_option("--subgroups", bf.subgroups, "Number of random subgroups (prefix steps)")
        ->capture_default_str();
    bench_cmd->add_flag("--attribute-scaling", bf.attribute_scaling, "Grow attribute prefixes instead of instances");
    bench_cmd->add_flag("--phases", bf.phases, "Separate induction and extraction rows in the CSV");
    bench_cmd->add_option("-o,--out", bf.out, "Report CSV (default: standard output)");
    bench_cmd->add_option("--json", bf.json, "Also write the full report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*induce) {
            return run_induce(in, model, common, out);
        }
        if (*train_cmd) {
            return run_train(in, model, common, out);
        }
        if (*predict_cmd) {
            return run_predict(in, model_path, unlabeled, out);
        }
        if (*eval_cmd) {
            return run_eval(in, model, common, ev);
        }
        if (*bench_cmd) {
            return run_bench(in, model, common, bf);
        }
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    } catch (const frule::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return exit_internal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
    return exit_usage;
}
