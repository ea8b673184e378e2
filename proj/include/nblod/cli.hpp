#pragma once

#include <algorithm>
#include <charconv>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nblod/dataset.hpp"
#include "nblod/harness.hpp"
#include "nblod/method_tag.hpp"

namespace nblod {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HelpRequested {
    std::string text;
};

struct CliConfig {
    enum class Command { Generate, Run, Sweep };
    Command command = Command::Run;

    // dataset source (exactly one)
    std::optional<std::string> csv_path;
    std::optional<std::string> label_column;
    bool csv_header = false;
    std::optional<SyntheticSpec> synthetic;

    std::vector<MethodTag> methods;
    int k_min = 5, k_max = 50, k_stride = 1;
    bool normalize = false;
    std::optional<std::string> out; // generate: file path; run/sweep: directory
    EmitFormats formats;
    unsigned threads = 0;
    bool gen_header = false;
};

namespace detail {

// a..b[:stride] or a single integer
inline void parse_k_range(const std::string& tok, int& k_min, int& k_max, int& stride) {
    auto to_int = [&tok](const std::string& part) {
        int v = 0;
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || p != part.data() + part.size())
            throw UsageError("invalid --k value '" + tok + "' (expected N or A..B[:STRIDE])");
        return v;
    };
    std::string body = tok;
    stride = 1;
    if (const auto colon = body.find(':'); colon != std::string::npos) {
        stride = to_int(body.substr(colon + 1));
        body = body.substr(0, colon);
    }
    if (const auto dots = body.find(".."); dots != std::string::npos) {
        k_min = to_int(body.substr(0, dots));
        k_max = to_int(body.substr(dots + 2));
    } else {
        k_min = k_max = to_int(body);
    }
    if (k_min < 1 || k_max < k_min || stride < 1)
        throw UsageError("invalid --k range '" + tok + "'");
}

inline std::vector<MethodTag> parse_methods(const std::string& tok) {
    std::string lowered = tok;
    for (auto& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lowered == "all") return all_method_tags();
    std::vector<MethodTag> out;
    std::stringstream ss(tok);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        try {
            out.push_back(parse_method_tag(part));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (out.empty()) throw UsageError("no method tags given");
    return out;
}

inline EmitFormats parse_formats(const std::string& tok) {
    EmitFormats f{false, false};
    std::stringstream ss(tok);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part == "csv")
            f.csv = true;
        else if (part == "json")
            f.json = true;
        else
            throw UsageError("unknown format '" + part + "' (expected csv,json)");
    }
    if (!f.csv && !f.json) throw UsageError("no output format given");
    return f;
}

} // namespace detail

inline CliConfig parse_args(std::vector<std::string> args) {
    CLI::App app{"neighbor-based local outlier detection"};
    app.require_subcommand(1);

    CliConfig cfg;
    std::string synthetic_tok, seed_tok = "0", k_tok, methods_tok, format_tok = "csv";

    auto add_source = [&](CLI::App* cmd) {
        cmd->add_option("--csv", "CSV dataset path")->type_name("PATH");
        cmd->add_option("--label", "label column (name with --header, else 0-based index)")
            ->type_name("COL");
        cmd->add_flag("--header", "CSV file has a header row");
        cmd->add_option("--synthetic", "synthetic variant data1|data2|data3")->type_name("NAME");
        cmd->add_option("--seed", "synthetic generator seed")->type_name("N");
    };

    CLI::App* gen = app.add_subcommand("generate", "write a synthetic dataset as CSV");
    gen->add_option("--synthetic", synthetic_tok, "variant data1|data2|data3")->required();
    gen->add_option("--seed", seed_tok, "generator seed");
    gen->add_option("--out", "output CSV path")->required()->type_name("PATH");
    gen->add_flag("--with-header", "emit a header row (x0..xD-1,label)");

    CLI::App* run = app.add_subcommand("run", "evaluate one method at one K");
    add_source(run);
    run->add_option("--method", "method tag, e.g. fp-knn-ss")->required()->type_name("TAG");
    run->add_option("--k", "neighborhood size")->required()->type_name("N");
    run->add_flag("--normalize", "min-max scale features first");
    run->add_option("--out", "output directory")->type_name("DIR");
    run->add_option("--format", format_tok, "csv,json subset");
    run->add_option("--threads", "worker threads (0 = auto)")->type_name("N");

    CLI::App* sweep = app.add_subcommand("sweep", "evaluate a method grid over a K range");
    add_source(sweep);
    sweep->add_option("--methods", "comma-separated tags or 'all'")->required()->type_name("TAGS");
    sweep->add_option("--k", "K or A..B[:STRIDE] (default 5..50)")->type_name("RANGE");
    sweep->add_flag("--normalize", "min-max scale features first");
    sweep->add_option("--out", "output directory")->type_name("DIR");
    sweep->add_option("--format", format_tok, "csv,json subset");
    sweep->add_option("--threads", "worker threads (0 = auto)")->type_name("N");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        std::ostringstream help;
        help << app.help();
        throw HelpRequested{help.str()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    auto get_str = [](CLI::App* cmd, const std::string& name) -> std::optional<std::string> {
        const CLI::Option* opt = cmd->get_option(name);
        if (!opt || opt->count() == 0) return std::nullopt;
        return opt->results().front();
    };
    auto get_uint = [&](CLI::App* cmd, const std::string& name, unsigned fallback) {
        const auto s = get_str(cmd, name);
        if (!s) return fallback;
        unsigned v = 0;
        auto [p, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
        if (ec != std::errc() || p != s->data() + s->size())
            throw UsageError("invalid value '" + *s + "' for " + name);
        return v;
    };

    auto fill_source = [&](CLI::App* cmd) {
        cfg.csv_path = get_str(cmd, "--csv");
        cfg.label_column = get_str(cmd, "--label");
        cfg.csv_header = cmd->get_option("--header")->count() > 0;
        const auto syn = get_str(cmd, "--synthetic");
        if (syn) {
            SyntheticSpec spec;
            try {
                spec.variant = parse_variant(*syn);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            spec.seed = get_uint(cmd, "--seed", 0);
            cfg.synthetic = spec;
        }
        if (cfg.csv_path.has_value() == cfg.synthetic.has_value())
            throw UsageError("exactly one dataset source required: --csv or --synthetic");
    };

    if (gen->parsed()) {
        cfg.command = CliConfig::Command::Generate;
        SyntheticSpec spec;
        try {
            spec.variant = parse_variant(synthetic_tok);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        {
            std::uint64_t v = 0;
            auto [p, ec] = std::from_chars(seed_tok.data(), seed_tok.data() + seed_tok.size(), v);
            if (ec != std::errc() || p != seed_tok.data() + seed_tok.size())
                throw UsageError("invalid --seed value '" + seed_tok + "'");
            spec.seed = v;
        }
        cfg.synthetic = spec;
        cfg.out = get_str(gen, "--out");
        cfg.gen_header = gen->get_option("--with-header")->count() > 0;
        return cfg;
    }

    CLI::App* cmd = run->parsed() ? run : sweep;
    cfg.command = run->parsed() ? CliConfig::Command::Run : CliConfig::Command::Sweep;
    fill_source(cmd);
    cfg.normalize = cmd->get_option("--normalize")->count() > 0;
    cfg.out = get_str(cmd, "--out");
    cfg.formats = detail::parse_formats(format_tok);
    cfg.threads = get_uint(cmd, "--threads", 0);

    if (run->parsed()) {
        cfg.methods = {[&] {
            try {
                return parse_method_tag(*get_str(run, "--method"));
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
        }()};
        detail::parse_k_range(*get_str(run, "--k"), cfg.k_min, cfg.k_max, cfg.k_stride);
        if (cfg.k_min != cfg.k_max) throw UsageError("run takes a single --k, not a range");
    } else {
        cfg.methods = detail::parse_methods(*get_str(sweep, "--methods"));
        if (const auto k = get_str(sweep, "--k"))
            detail::parse_k_range(*k, cfg.k_min, cfg.k_max, cfg.k_stride);
    }
    return cfg;
}

namespace detail {

inline Dataset load_source(const CliConfig& cfg) {
    if (cfg.synthetic) return generate_synthetic(*cfg.synthetic);
    CsvReadOptions opts;
    opts.has_header = cfg.csv_header;
    opts.label_column = cfg.label_column;
    if (!cfg.csv_header && cfg.label_column && !detail::parse_index(*cfg.label_column))
        opts.has_header = true; // a named label column implies a header row
    return load_csv(*cfg.csv_path, opts);
}

inline void print_summary_table(std::ostream& os, const SweepResult& result) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-12s %10s %10s %10s %6s", "method", "auc", "acc_n",
                  "acc_2n", "cells");
    os << buf << "\n";
    for (const auto& s : result.summary) {
        std::snprintf(buf, sizeof(buf), "%-12s %10.6f %10.6f %10.6f %6zu", s.method_tag.c_str(),
                      s.mean_auc, s.mean_acc_n, s.mean_acc_2n, s.cells);
        os << buf << "\n";
    }
}

} // namespace detail

// Dispatches a parsed config; returns 0 on success. Data problems surface as
// exceptions for the caller to map onto exit status 2.
inline int run_cli(const CliConfig& cfg, std::ostream& os = std::cout) {
    if (cfg.command == CliConfig::Command::Generate) {
        const Dataset ds = generate_synthetic(*cfg.synthetic);
        CsvWriteOptions w;
        w.header = cfg.gen_header;
        save_csv(ds, *cfg.out, w);
        os << "wrote " << ds.name() << " seed=" << cfg.synthetic->seed << ": N=" << ds.size()
           << " D=" << ds.dim() << " outliers=" << ds.outlier_count() << " -> " << *cfg.out
           << "\n";
        return 0;
    }

    const Dataset ds = detail::load_source(cfg);
    if (!ds.has_labels())
        throw std::runtime_error("dataset has no labels; pass --label for CSV sources");
    if (static_cast<std::size_t>(cfg.k_min) >= ds.size())
        throw std::runtime_error("k = " + std::to_string(cfg.k_min) +
                                 " is out of range for N = " + std::to_string(ds.size()));

    std::vector<PipelineSpec> specs;
    specs.reserve(cfg.methods.size());
    for (const auto& tag : cfg.methods)
        specs.push_back(
            {tag.space, tag.kind, tag.methodology, cfg.k_min, cfg.k_max, cfg.k_stride});

    RunOptions opts;
    opts.normalize = cfg.normalize;
    opts.threads = cfg.threads;
    const SweepResult result = run_sweep(ds, specs, opts);

    std::size_t failed = 0;
    for (const auto& c : result.cells)
        if (!c.report) failed++;

    detail::print_summary_table(os, result);
    if (cfg.out) emit_reports(result, *cfg.out, cfg.formats);
    if (failed == result.cells.size() && !result.cells.empty())
        throw std::runtime_error("all cells failed: " + result.cells.front().error);
    return 0;
}

inline int cli_main(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const CliConfig cfg = parse_args(std::move(args));
        return run_cli(cfg);
    } catch (const HelpRequested& h) {
        std::cout << h.text;
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace nblod
