// capi.cpp - extern "C" surface of libtabscore
#include "tabscore.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <span>
#include <string>

#include <json.hpp>

#include "config.hpp"
#include "cwssim.hpp"
#include "grpo.hpp"
#include "harness.hpp"
#include "png_io.hpp"
#include "structure_tree.hpp"
#include "tree_edit.hpp"

using namespace tabscore;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename F>
tabscore_status guarded(F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        g_last_error = e.what();
        return TABSCORE_ERROR_PARSE;
    } catch (const ToolchainUnavailable& e) {
        g_last_error = e.what();
        return TABSCORE_ERROR_TOOLCHAIN;
    } catch (const PngError& e) {
        g_last_error = e.what();
        return TABSCORE_ERROR_IO;
    } catch (const HarnessError& e) {
        g_last_error = e.what();
        return TABSCORE_ERROR_IO;
    } catch (const ConfigError& e) {
        g_last_error = e.what();
        return TABSCORE_ERROR_IO;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return TABSCORE_ERROR_INVALID_ARGUMENT;
    } catch (const nlohmann::json::exception& e) {
        g_last_error = e.what();
        return TABSCORE_ERROR_IO;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TABSCORE_ERROR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return TABSCORE_ERROR_INTERNAL;
    }
}

tabscore_status invalid(const char* message) {
    g_last_error = message;
    return TABSCORE_ERROR_INVALID_ARGUMENT;
}

const HarnessConfig& as_config(const tabscore_config* config);

} // namespace

struct tabscore_config {
    HarnessConfig cfg;
};

struct tabscore_table {
    TableModel model;
    ComplexityClass complexity = ComplexityClass::Simple;
};

struct tabscore_image {
    GrayImage image;
};

namespace {

const HarnessConfig& as_config(const tabscore_config* config) {
    static const HarnessConfig defaults;
    return config ? config->cfg : defaults;
}

} // namespace

extern "C" {

const char* tabscore_version(void) {
    return "0.1.0";
}

const char* tabscore_status_name(tabscore_status status) {
    switch (status) {
    case TABSCORE_OK:
        return "ok";
    case TABSCORE_ERROR_INVALID_ARGUMENT:
        return "invalid argument";
    case TABSCORE_ERROR_PARSE:
        return "parse error";
    case TABSCORE_ERROR_IO:
        return "io error";
    case TABSCORE_ERROR_TOOLCHAIN:
        return "toolchain unavailable";
    case TABSCORE_ERROR_INTERNAL:
        return "internal error";
    }
    return "unknown";
}

const char* tabscore_last_error(void) {
    return g_last_error.c_str();
}

void tabscore_string_free(char* str) {
    std::free(str);
}

/* ------------------------------------------------------------------ config */

tabscore_config* tabscore_config_create(void) {
    return new (std::nothrow) tabscore_config{};
}

tabscore_status tabscore_config_load(const char* path, tabscore_config** out) {
    if (!path || !out)
        return invalid("tabscore_config_load: path and out must be non-NULL");
    return guarded([&] {
        auto cfg = std::make_unique<tabscore_config>();
        cfg->cfg = HarnessConfig::from_file(path);
        *out = cfg.release();
        return TABSCORE_OK;
    });
}

tabscore_status tabscore_config_merge_json(tabscore_config* config, const char* json_text) {
    if (!config || !json_text)
        return invalid("tabscore_config_merge_json: config and json_text must be non-NULL");
    return guarded([&] {
        config->cfg.merge_json_text(json_text);
        return TABSCORE_OK;
    });
}

tabscore_status tabscore_config_to_json(const tabscore_config* config, char** out) {
    if (!config || !out)
        return invalid("tabscore_config_to_json: config and out must be non-NULL");
    return guarded([&] {
        *out = dup_string(config->cfg.to_json_text());
        return TABSCORE_OK;
    });
}

void tabscore_config_free(tabscore_config* config) {
    delete config;
}

/* ------------------------------------------------------------------ tables */

tabscore_status tabscore_table_parse(const tabscore_config* config, const char* latex,
                                     int clean_first, tabscore_table** out) {
    if (!latex || !out)
        return invalid("tabscore_table_parse: latex and out must be non-NULL");
    return guarded([&] {
        const HarnessConfig& cfg = as_config(config);
        TabularSource src{latex, std::nullopt};
        if (clean_first)
            src = clean(src, cfg.strip);
        auto table = std::make_unique<tabscore_table>();
        table->model = parse_tabular(src);
        table->complexity = classify_complexity(table->model, count_span_commands(src.raw));
        *out = table.release();
        return TABSCORE_OK;
    });
}

int tabscore_table_rows(const tabscore_table* table) {
    return table ? table->model.n_rows : 0;
}

int tabscore_table_cols(const tabscore_table* table) {
    return table ? table->model.n_cols : 0;
}

long tabscore_table_cell_count(const tabscore_table* table) {
    return table ? cell_count(table->model) : 0;
}

int tabscore_table_complexity(const tabscore_table* table) {
    return table ? static_cast<int>(table->complexity) : 0;
}

tabscore_status tabscore_table_html(const tabscore_table* table, char** out) {
    if (!table || !out)
        return invalid("tabscore_table_html: table and out must be non-NULL");
    return guarded([&] {
        *out = dup_string(serialize_html(to_structure_tree(table->model)));
        return TABSCORE_OK;
    });
}

tabscore_status tabscore_table_canonical_latex(const tabscore_table* table, char** out) {
    if (!table || !out)
        return invalid("tabscore_table_canonical_latex: table and out must be non-NULL");
    return guarded([&] {
        *out = dup_string(to_canonical_latex(table->model));
        return TABSCORE_OK;
    });
}

void tabscore_table_free(tabscore_table* table) {
    delete table;
}

tabscore_status tabscore_clean(const tabscore_config* config, const char* latex, char** out) {
    if (!latex || !out)
        return invalid("tabscore_clean: latex and out must be non-NULL");
    return guarded([&] {
        *out = dup_string(clean({latex, std::nullopt}, as_config(config).strip).raw);
        return TABSCORE_OK;
    });
}

/* ------------------------------------------------------------- tree metric */

tabscore_status tabscore_teds(const tabscore_table* pred, const tabscore_table* gt,
                              int structure_only, double* similarity) {
    if (!pred || !gt || !similarity)
        return invalid("tabscore_teds: pred, gt and similarity must be non-NULL");
    return guarded([&] {
        StructTree pred_tree = to_structure_tree(pred->model);
        StructTree gt_tree = to_structure_tree(gt->model);
        TedResult r = structure_only ? teds_structure(pred_tree, gt_tree)
                                     : teds(pred_tree, gt_tree);
        *similarity = r.similarity;
        return TABSCORE_OK;
    });
}

/* ------------------------------------------------------------------- image */

tabscore_status tabscore_image_load_png(const char* path, tabscore_image** out) {
    if (!path || !out)
        return invalid("tabscore_image_load_png: path and out must be non-NULL");
    return guarded([&] {
        auto img = std::make_unique<tabscore_image>();
        img->image = load_png_gray(path);
        *out = img.release();
        return TABSCORE_OK;
    });
}

tabscore_status tabscore_image_create_gray(const double* pixels, int width, int height,
                                           tabscore_image** out) {
    if (!pixels || !out)
        return invalid("tabscore_image_create_gray: pixels and out must be non-NULL");
    return guarded([&] {
        auto img = std::make_unique<tabscore_image>();
        img->image = GrayImage(width, height);
        img->image.pixels.assign(pixels, pixels + static_cast<size_t>(width) * height);
        *out = img.release();
        return TABSCORE_OK;
    });
}

int tabscore_image_width(const tabscore_image* image) {
    return image ? image->image.width : 0;
}

int tabscore_image_height(const tabscore_image* image) {
    return image ? image->image.height : 0;
}

void tabscore_image_free(tabscore_image* image) {
    delete image;
}

tabscore_status tabscore_cwssim(const tabscore_image* x, const tabscore_image* y, double* value) {
    if (!x || !y || !value)
        return invalid("tabscore_cwssim: x, y and value must be non-NULL");
    return guarded([&] {
        *value = cw_ssim(x->image, y->image);
        return TABSCORE_OK;
    });
}

/* ----------------------------------------------------------------- rewards */

tabscore_status tabscore_structure_reward(const tabscore_config* config, const char* pred_latex,
                                          const char* gt_latex, int* reward) {
    if (!pred_latex || !gt_latex || !reward)
        return invalid("tabscore_structure_reward: all arguments must be non-NULL");
    return guarded([&] {
        *reward = structure_reward({pred_latex, std::nullopt}, {gt_latex, std::nullopt},
                                   as_config(config).thresholds);
        return TABSCORE_OK;
    });
}

/* --------------------------------------------------------------- grpo math */

tabscore_status tabscore_advantages(const double* rewards, int n, double* out) {
    if (!rewards || !out)
        return invalid("tabscore_advantages: rewards and out must be non-NULL");
    if (n < 2)
        return invalid("tabscore_advantages: group size must be at least 2");
    return guarded([&] {
        std::vector<double> result = advantages(std::span<const double>(rewards, n));
        std::memcpy(out, result.data(), result.size() * sizeof(double));
        return TABSCORE_OK;
    });
}

double tabscore_kl_estimate(double logp_ref, double logp_cur) {
    return kl_estimate(logp_ref, logp_cur);
}

tabscore_status tabscore_rft_objective(const double* logp_cur, const double* logp_old,
                                       const double* logp_ref, const double* adv, int n,
                                       double epsilon, double beta, double* out) {
    if (!logp_cur || !logp_old || !logp_ref || !adv || !out)
        return invalid("tabscore_rft_objective: all arrays must be non-NULL");
    if (n <= 0)
        return invalid("tabscore_rft_objective: n must be positive");
    return guarded([&] {
        std::vector<SequenceLogProbs> seq(n);
        for (int i = 0; i < n; ++i)
            seq[i] = {logp_cur[i], logp_old[i], logp_ref[i]};
        HyperParams hp;
        hp.epsilon = epsilon;
        hp.beta = beta;
        *out = rft_objective(seq, std::span<const double>(adv, n), hp);
        return TABSCORE_OK;
    });
}

double tabscore_sft_nll(const double* logp_targets, int n) {
    if (!logp_targets || n <= 0)
        return 0.0;
    return sft_nll(std::span<const double>(logp_targets, n));
}

/* ----------------------------------------------------------------- harness */

tabscore_status tabscore_build_corpus(const tabscore_config* config, const char* source_dir,
                                      const char* output_path, char** summary_json) {
    if (!source_dir || !output_path)
        return invalid("tabscore_build_corpus: source_dir and output_path must be non-NULL");
    return guarded([&] {
        BuildSummary summary = build_corpus(source_dir, output_path, as_config(config));
        if (summary_json)
            *summary_json = dup_string(build_summary_to_json(summary));
        return TABSCORE_OK;
    });
}

tabscore_status tabscore_evaluate(const tabscore_config* config, const char* predictions_path,
                                  const char* corpus_path, int no_render,
                                  const char* report_json_path, char** report_json) {
    if (!predictions_path || !corpus_path)
        return invalid("tabscore_evaluate: predictions_path and corpus_path must be non-NULL");
    return guarded([&] {
        const HarnessConfig& cfg = as_config(config);
        std::unique_ptr<RenderBridge> bridge;
        if (!no_render) {
            bridge = std::make_unique<RenderBridge>(cfg.render);
            if (!bridge->probe())
                throw ToolchainUnavailable("LaTeX toolchain unavailable: cannot run '" +
                                           cfg.render.compiler_command + "'");
        }
        MetricReport report = evaluate(predictions_path, corpus_path, cfg, bridge.get());
        std::string json_text = report_to_json(report);
        if (report_json_path) {
            std::ofstream out(report_json_path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw HarnessError(std::string("cannot write report: ") + report_json_path);
            out << json_text << "\n";
        }
        if (report_json)
            *report_json = dup_string(json_text);
        return TABSCORE_OK;
    });
}

tabscore_status tabscore_format_report(const char* report_json, char** out) {
    if (!report_json || !out)
        return invalid("tabscore_format_report: report_json and out must be non-NULL");
    return guarded([&] {
        nlohmann::json j = nlohmann::json::parse(report_json);
        MetricReport report;
        report.visual_present = j.value("visual_present", false);
        report.scored = j.value("scored", 0L);
        report.id_mismatches = j.value("id_mismatches", 0L);
        for (const auto& jb : j.value("buckets", nlohmann::json::array())) {
            BucketStats b;
            b.name = jb.value("name", "");
            b.count = jb.value("count", 0L);
            if (!jb.value("mean_cwssim", nlohmann::json()).is_null())
                b.mean_cwssim = jb.value("mean_cwssim", 0.0);
            if (!jb.value("compile_ratio", nlohmann::json()).is_null())
                b.compile_ratio = jb.value("compile_ratio", 0.0);
            b.mean_teds = jb.value("mean_teds", 0.0);
            b.mean_teds_structure = jb.value("mean_teds_structure", 0.0);
            report.buckets.push_back(std::move(b));
        }
        *out = dup_string(format_report_table(report));
        return TABSCORE_OK;
    });
}

tabscore_status tabscore_reward_run(const tabscore_config* config, const char* corpus_path,
                                    const char* candidates_path, int no_render,
                                    const char* output_path, char** summary_json) {
    if (!corpus_path || !candidates_path || !output_path)
        return invalid("tabscore_reward_run: paths must be non-NULL");
    return guarded([&] {
        const HarnessConfig& cfg = as_config(config);
        std::unique_ptr<RenderBridge> bridge;
        if (!no_render)
            bridge = std::make_unique<RenderBridge>(cfg.render);
        RewardRunSummary summary =
            reward_run(corpus_path, candidates_path, output_path, cfg, bridge.get());
        if (summary_json)
            *summary_json = dup_string(reward_summary_to_json(summary));
        return TABSCORE_OK;
    });
}

tabscore_status tabscore_metric_pair(const tabscore_config* config, const char* pred_latex,
                                     const char* gt_latex, const char* pred_image_png,
                                     const char* gt_image_png, int no_render, char** result_json) {
    if (!pred_latex || !gt_latex || !result_json)
        return invalid("tabscore_metric_pair: pred_latex, gt_latex and result_json must be non-NULL");
    return guarded([&] {
        const HarnessConfig& cfg = as_config(config);
        // Rendering is only needed for sides without a supplied image.
        bool have_pred_img = pred_image_png && *pred_image_png;
        bool have_gt_img = gt_image_png && *gt_image_png;
        std::unique_ptr<RenderBridge> bridge;
        if (!no_render && (!have_pred_img || !have_gt_img)) {
            bridge = std::make_unique<RenderBridge>(cfg.render);
            if (!bridge->probe())
                throw ToolchainUnavailable("LaTeX toolchain unavailable: cannot run '" +
                                           cfg.render.compiler_command + "'");
        }
        *result_json = dup_string(metric_pair_json(pred_latex, gt_latex,
                                                   pred_image_png ? pred_image_png : "",
                                                   gt_image_png ? gt_image_png : "", cfg,
                                                   bridge.get()));
        return TABSCORE_OK;
    });
}

} // extern "C"
