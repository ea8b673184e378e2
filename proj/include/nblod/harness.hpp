#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "nblod/dataset.hpp"
#include "nblod/method_tag.hpp"
#include "nblod/metrics.hpp"
#include "nblod/parallel.hpp"
#include "nblod/scoring.hpp"
#include "nblod/space.hpp"

namespace nblod {

struct PipelineSpec {
    TransformKind space;
    SetKind set_kind;
    Methodology methodology;
    int k_min = 5;
    int k_max = 50;
    int k_stride = 1;

    MethodTag tag() const { return {space, set_kind, methodology}; }
};

struct RunOptions {
    bool normalize = false; // opt-in per-feature min-max scaling
    unsigned threads = 0;   // 0 = hardware concurrency
};

struct CellOutcome {
    std::string method_tag;
    int k = 0;
    std::optional<EvalReport> report;
    std::string error; // nonempty iff the cell failed
};

struct MethodSummary {
    std::string method_tag;
    double mean_auc = 0.0;
    double mean_acc_n = 0.0;
    double mean_acc_2n = 0.0;
    std::size_t cells = 0; // successful cells behind the means
};

struct SweepResult {
    std::vector<CellOutcome> cells;
    std::vector<MethodSummary> summary;
    std::size_t models_built = 0;
};

namespace detail {

inline Dataset minmax_normalize(const Dataset& ds) {
    const std::size_t n = ds.size(), d = ds.dim();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], ds.coord(i, j));
            hi[j] = std::max(hi[j], ds.coord(i, j));
        }
    std::vector<double> out(n * d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double span = hi[j] - lo[j];
            out[i * d + j] = span > 0.0 ? (ds.coord(i, j) - lo[j]) / span : 0.0;
        }
    return ds.with_points(d, std::move(out));
}

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline EvalReport run_pipeline(const Dataset& ds, const PipelineSpec& spec, int k,
                               const RunOptions& opts = {}) {
    if (!ds.has_labels())
        throw std::invalid_argument("run_pipeline: dataset has no labels");
    const Dataset& base = opts.normalize ? detail::minmax_normalize(ds) : ds;
    const SpaceTransform transform = SpaceTransform::fit(spec.space, base);
    const Dataset projected = transform.apply(base);
    const NeighborModel model = build_model(projected, k, spec.methodology, opts.threads);
    const ScoreVector scores =
        score_all(model, spec.set_kind, format_method_tag(spec.tag()), opts.threads);
    return evaluate(scores, ds.labels());
}

// Evaluates every (spec, k) cell. Neighbor models are built once per
// (space, methodology, k) and shared across set kinds; a failing cell is
// recorded as an error entry without aborting the sweep.
inline SweepResult run_sweep(const Dataset& ds, const std::vector<PipelineSpec>& specs,
                             const RunOptions& opts = {}) {
    if (!ds.has_labels())
        throw std::invalid_argument("run_sweep: dataset has no labels");

    const Dataset& base = opts.normalize ? detail::minmax_normalize(ds) : ds;

    // space transforms fitted once per dataset
    std::map<TransformKind, Dataset> projected;
    std::string space_error;
    for (const auto& spec : specs) {
        if (projected.count(spec.space)) continue;
        try {
            projected.emplace(spec.space, SpaceTransform::fit(spec.space, base).apply(base));
        } catch (const std::exception& e) {
            space_error = e.what();
        }
    }

    SweepResult result;
    struct CellRef {
        std::size_t spec_idx;
        std::size_t cell_idx;
    };
    using TaskKey = std::tuple<TransformKind, Methodology, int>;
    std::map<TaskKey, std::vector<CellRef>> tasks;

    for (std::size_t s = 0; s < specs.size(); ++s) {
        const auto& spec = specs[s];
        const int stride = std::max(1, spec.k_stride);
        for (int k = spec.k_min; k <= spec.k_max; k += stride) {
            CellOutcome cell;
            cell.method_tag = format_method_tag(spec.tag());
            cell.k = k;
            const std::size_t idx = result.cells.size();
            result.cells.push_back(std::move(cell));
            tasks[{spec.space, spec.methodology, k}].push_back({s, idx});
        }
    }

    std::vector<const std::pair<const TaskKey, std::vector<CellRef>>*> task_list;
    task_list.reserve(tasks.size());
    for (const auto& t : tasks) task_list.push_back(&t);

    std::atomic<std::size_t> built{0};
    parallel_for(
        task_list.size(),
        [&](std::size_t ti) {
            const auto& [key, refs] = *task_list[ti];
            const auto& [space, methodology, k] = key;
            const auto proj_it = projected.find(space);
            if (proj_it == projected.end()) {
                for (const auto& ref : refs) result.cells[ref.cell_idx].error = space_error;
                return;
            }
            std::optional<NeighborModel> model;
            try {
                model.emplace(build_model(proj_it->second, k, methodology, 1));
                built.fetch_add(1, std::memory_order_relaxed);
            } catch (const std::exception& e) {
                for (const auto& ref : refs) result.cells[ref.cell_idx].error = e.what();
                return;
            }
            for (const auto& ref : refs) {
                CellOutcome& cell = result.cells[ref.cell_idx];
                try {
                    const ScoreVector scores =
                        score_all(*model, specs[ref.spec_idx].set_kind, cell.method_tag, 1);
                    cell.report = evaluate(scores, ds.labels());
                } catch (const std::exception& e) {
                    cell.error = e.what();
                }
            }
        },
        opts.threads);
    result.models_built = built.load();

    // summary rows in spec order; means over successful cells only
    std::size_t cursor = 0;
    for (const auto& spec : specs) {
        MethodSummary sum;
        sum.method_tag = format_method_tag(spec.tag());
        const int stride = std::max(1, spec.k_stride);
        for (int k = spec.k_min; k <= spec.k_max; k += stride, ++cursor) {
            const CellOutcome& cell = result.cells[cursor];
            if (!cell.report) continue;
            sum.mean_auc += cell.report->auc;
            sum.mean_acc_n += cell.report->acc_n;
            sum.mean_acc_2n += cell.report->acc_2n;
            sum.cells++;
        }
        if (sum.cells > 0) {
            sum.mean_auc /= static_cast<double>(sum.cells);
            sum.mean_acc_n /= static_cast<double>(sum.cells);
            sum.mean_acc_2n /= static_cast<double>(sum.cells);
        }
        result.summary.push_back(std::move(sum));
    }
    return result;
}

struct EmitFormats {
    bool csv = true;
    bool json = false;
};

// Writes cells.csv, summary.csv and curves/<method_tag>.csv (plus report.json
// when requested). Values at full round-trip precision.
inline void emit_reports(const SweepResult& result, const std::string& out_dir,
                         const EmitFormats& formats = {}) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(out_dir) / "curves", ec);
    if (ec)
        throw std::runtime_error("emit_reports: cannot create '" + out_dir +
                                 "': " + ec.message());

    auto open = [](const fs::path& p) {
        std::ofstream f(p);
        if (!f) throw std::runtime_error("emit_reports: cannot write '" + p.string() + "'");
        return f;
    };

    if (formats.csv) {
        auto cells = open(fs::path(out_dir) / "cells.csv");
        cells << "method_tag,k,auc,acc_n,acc_2n\n";
        bool any_error = false;
        for (const auto& c : result.cells) {
            if (!c.report) {
                any_error = true;
                continue;
            }
            cells << c.method_tag << "," << c.k << "," << detail::fmt_g17(c.report->auc) << ","
                  << detail::fmt_g17(c.report->acc_n) << "," << detail::fmt_g17(c.report->acc_2n)
                  << "\n";
        }
        if (any_error) {
            auto errs = open(fs::path(out_dir) / "errors.csv");
            errs << "method_tag,k,error\n";
            for (const auto& c : result.cells)
                if (!c.report) errs << c.method_tag << "," << c.k << ",\"" << c.error << "\"\n";
        }

        auto summary = open(fs::path(out_dir) / "summary.csv");
        summary << "method_tag,mean_auc,mean_acc_n,mean_acc_2n\n";
        for (const auto& s : result.summary)
            summary << s.method_tag << "," << detail::fmt_g17(s.mean_auc) << ","
                    << detail::fmt_g17(s.mean_acc_n) << "," << detail::fmt_g17(s.mean_acc_2n)
                    << "\n";

        for (const auto& s : result.summary) {
            auto curve = open(fs::path(out_dir) / "curves" / (s.method_tag + ".csv"));
            curve << "k,auc\n";
            for (const auto& c : result.cells)
                if (c.report && c.method_tag == s.method_tag)
                    curve << c.k << "," << detail::fmt_g17(c.report->auc) << "\n";
        }
    }

    if (formats.json) {
        nlohmann::json doc;
        doc["cells"] = nlohmann::json::array();
        for (const auto& c : result.cells) {
            nlohmann::json jc{{"method_tag", c.method_tag}, {"k", c.k}};
            if (c.report) {
                jc["auc"] = c.report->auc;
                jc["acc_n"] = c.report->acc_n;
                jc["acc_2n"] = c.report->acc_2n;
            } else {
                jc["error"] = c.error;
            }
            doc["cells"].push_back(std::move(jc));
        }
        doc["summary"] = nlohmann::json::array();
        for (const auto& s : result.summary)
            doc["summary"].push_back({{"method_tag", s.method_tag},
                                      {"mean_auc", s.mean_auc},
                                      {"mean_acc_n", s.mean_acc_n},
                                      {"mean_acc_2n", s.mean_acc_2n}});
        auto jf = open(fs::path(out_dir) / "report.json");
        jf << doc.dump(2) << "\n";
    }
}

} // namespace nblod
