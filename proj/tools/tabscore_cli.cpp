// tabscore_cli.cpp - command-line front end over the tabscore C API
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tabscore.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitToolchain = 2;

struct ConfigDeleter {
    void operator()(tabscore_config* c) const { tabscore_config_free(c); }
};
using ConfigPtr = std::unique_ptr<tabscore_config, ConfigDeleter>;

struct StringDeleter {
    void operator()(char* s) const { tabscore_string_free(s); }
};
using StringPtr = std::unique_ptr<char, StringDeleter>;

int fail(tabscore_status status) {
    std::cerr << "error (" << tabscore_status_name(status) << "): " << tabscore_last_error()
              << "\n";
    return status == TABSCORE_ERROR_TOOLCHAIN ? kExitToolchain : kExitUsage;
}

ConfigPtr make_config(const std::string& config_path, const std::string& buckets_csv) {
    ConfigPtr cfg;
    if (!config_path.empty()) {
        tabscore_config* raw = nullptr;
        tabscore_status st = tabscore_config_load(config_path.c_str(), &raw);
        if (st != TABSCORE_OK) {
            std::cerr << "error loading config: " << tabscore_last_error() << "\n";
            return nullptr;
        }
        cfg.reset(raw);
    } else {
        cfg.reset(tabscore_config_create());
    }
    if (!buckets_csv.empty()) {
        nlohmann::json names = nlohmann::json::array();
        std::stringstream ss(buckets_csv);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty())
                names.push_back(item);
        std::string patch = nlohmann::json{{"buckets", names}}.dump();
        if (tabscore_config_merge_json(cfg.get(), patch.c_str()) != TABSCORE_OK) {
            std::cerr << "error: " << tabscore_last_error() << "\n";
            return nullptr;
        }
    }
    return cfg;
}

// "-" reads standard input.
std::string read_input(const std::string& path) {
    std::ostringstream buf;
    if (path == "-") {
        buf << std::cin.rdbuf();
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot read " + path);
        buf << in.rdbuf();
    }
    return buf.str();
}

void print_warnings(const std::string& summary_json) {
    auto j = nlohmann::json::parse(summary_json, nullptr, false);
    if (j.is_discarded())
        return;
    for (const auto& w : j.value("warnings", nlohmann::json::array()))
        std::cerr << w.get<std::string>() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tabscore - scoring and rewards for table-to-LaTeX generation"};
    app.set_version_flag("--version", tabscore_version());
    app.require_subcommand(1);

    std::string config_path;
    std::string buckets_csv;
    bool no_render = false;
    app.add_option("--config", config_path, "JSON configuration file")->expected(1);
    app.add_flag("--no-render", no_render, "skip LaTeX rendering and visual metrics");
    app.add_option("--buckets", buckets_csv,
                   "comma-separated complexity buckets to report (default all)");

    auto* build = app.add_subcommand("build-corpus",
                                     "extract, clean, parse and classify tables from .tex files");
    std::string source_dir, corpus_out;
    build->add_option("source_dir", source_dir, "directory of .tex files")->required();
    build->add_option("output", corpus_out, "corpus JSONL output path")->required();

    auto* eval = app.add_subcommand("evaluate", "score a predictions file against a corpus");
    std::string predictions_path, corpus_path, report_path;
    eval->add_option("predictions", predictions_path, "predictions JSONL ({id, latex})")
        ->required();
    eval->add_option("corpus", corpus_path, "corpus JSONL")->required();
    eval->add_option("--report", report_path, "write the JSON report here");

    auto* reward = app.add_subcommand("reward-run",
                                      "compute dual rewards and advantages for candidate groups");
    std::string rr_corpus, rr_candidates, rr_output;
    reward->add_option("corpus", rr_corpus, "corpus JSONL")->required();
    reward->add_option("candidates", rr_candidates, "candidate groups JSONL ({id, candidates})")
        ->required();
    reward->add_option("output", rr_output, "per-candidate outcome JSONL output")->required();

    auto* metric = app.add_subcommand("metric", "score a single prediction/ground-truth pair");
    std::string pred_path, gt_path, pred_image, gt_image;
    metric->add_option("--pred", pred_path, "prediction LaTeX file ('-' for stdin)")->required();
    metric->add_option("--gt", gt_path, "ground-truth LaTeX file")->required();
    metric->add_option("--pred-image", pred_image, "pre-rendered prediction PNG");
    metric->add_option("--gt-image", gt_image, "pre-rendered ground-truth PNG");

    CLI11_PARSE(app, argc, argv);

    ConfigPtr cfg = make_config(config_path, buckets_csv);
    if (!cfg)
        return kExitUsage;

    if (build->parsed()) {
        char* summary = nullptr;
        tabscore_status st =
            tabscore_build_corpus(cfg.get(), source_dir.c_str(), corpus_out.c_str(), &summary);
        if (st != TABSCORE_OK)
            return fail(st);
        StringPtr owned(summary);
        print_warnings(owned.get());
        std::cout << owned.get() << "\n";
        return kExitOk;
    }

    if (eval->parsed()) {
        char* report = nullptr;
        tabscore_status st = tabscore_evaluate(cfg.get(), predictions_path.c_str(),
                                               corpus_path.c_str(), no_render ? 1 : 0,
                                               report_path.empty() ? nullptr : report_path.c_str(),
                                               &report);
        if (st != TABSCORE_OK)
            return fail(st);
        StringPtr owned(report);
        print_warnings(owned.get());
        char* table = nullptr;
        if (tabscore_format_report(owned.get(), &table) == TABSCORE_OK) {
            StringPtr owned_table(table);
            std::cout << owned_table.get();
        }
        if (report_path.empty())
            std::cout << owned.get() << "\n";
        return kExitOk;
    }

    if (reward->parsed()) {
        char* summary = nullptr;
        tabscore_status st =
            tabscore_reward_run(cfg.get(), rr_corpus.c_str(), rr_candidates.c_str(),
                                no_render ? 1 : 0, rr_output.c_str(), &summary);
        if (st != TABSCORE_OK)
            return fail(st);
        StringPtr owned(summary);
        print_warnings(owned.get());
        std::cout << owned.get() << "\n";
        return kExitOk;
    }

    if (metric->parsed()) {
        std::string pred_text, gt_text;
        try {
            pred_text = read_input(pred_path);
            gt_text = read_input(gt_path);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        }
        char* result = nullptr;
        tabscore_status st = tabscore_metric_pair(
            cfg.get(), pred_text.c_str(), gt_text.c_str(),
            pred_image.empty() ? nullptr : pred_image.c_str(),
            gt_image.empty() ? nullptr : gt_image.c_str(), no_render ? 1 : 0, &result);
        if (st != TABSCORE_OK)
            return fail(st);
        StringPtr owned(result);
        std::cout << owned.get() << "\n";
        return kExitOk;
    }

    return kExitUsage;
}
