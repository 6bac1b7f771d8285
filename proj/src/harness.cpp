#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hash.hpp"
#include "png_io.hpp"
#include "structure_tree.hpp"

namespace fs = std::filesystem;

namespace tabscore {

using nlohmann::json;
using nlohmann::ordered_json;

double round_to(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

namespace {

json round_or_null(const std::optional<double>& v, int decimals) {
    if (!v)
        return nullptr;
    return round_to(*v, decimals);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw HarnessError("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

BuildSummary build_corpus(const std::string& source_dir, const std::string& output_path,
                          const HarnessConfig& cfg) {
    std::error_code ec;
    if (!fs::is_directory(source_dir, ec) || ec)
        throw HarnessError("not a readable directory: " + source_dir);

    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(source_dir, ec);
         it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_regular_file() && it->path().extension() == ".tex")
            files.push_back(it->path());
    }
    if (ec)
        throw HarnessError("failed to walk directory: " + source_dir);
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });

    std::ofstream out(output_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw HarnessError("cannot open corpus output: " + output_path);

    BuildSummary summary;
    std::map<std::string, int> seen_ids;
    for (const fs::path& file : files) {
        ++summary.files;
        std::string document = read_file(file);
        std::string rel = fs::relative(file, source_dir, ec).generic_string();
        if (ec)
            rel = file.generic_string();
        ExtractResult extracted = extract_tabulars(document, rel);
        for (const WarningRecord& w : extracted.warnings) {
            summary.warnings.push_back(format_warning(w));
            ++summary.skipped;
        }
        for (const TabularSource& raw : extracted.tables) {
            TabularSource cleaned = clean(raw, cfg.strip);
            TableModel model;
            try {
                model = parse_tabular(cleaned);
            } catch (const ParseError& e) {
                summary.warnings.push_back(format_warning(
                    {raw.origin.value_or(SourceOrigin{}), std::string("parse failed: ") + e.what()}));
                ++summary.skipped;
                continue;
            }
            ComplexityClass cls =
                classify_complexity(model, count_span_commands(cleaned.raw));

            std::string id = content_hash(cleaned.raw);
            int& times = seen_ids[id];
            ++times;
            if (times > 1)
                id += "-" + std::to_string(times);

            ordered_json line;
            line["id"] = id;
            line["gt_latex"] = cleaned.raw;
            line["complexity"] = to_string(cls);
            out << line.dump() << "\n";
            ++summary.tables;
            ++summary.by_class[to_string(cls)];
        }
    }
    return summary;
}

std::vector<CorpusRecord> load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw HarnessError("cannot open corpus: " + path);
    std::vector<CorpusRecord> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw HarnessError("corpus line " + std::to_string(line_no) + " is not valid JSON: " +
                               e.what());
        }
        CorpusRecord rec;
        rec.id = j.at("id").get<std::string>();
        rec.gt_latex = j.at("gt_latex").get<std::string>();
        auto cls = complexity_from_string(j.value("complexity", "simple"));
        if (!cls)
            throw HarnessError("corpus line " + std::to_string(line_no) + ": unknown complexity");
        rec.complexity = *cls;
        rec.gt_image = j.value("gt_image", "");
        records.push_back(std::move(rec));
    }
    return records;
}

std::map<std::string, std::string> load_predictions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw HarnessError("cannot open predictions: " + path);
    std::map<std::string, std::string> preds;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw HarnessError("predictions line " + std::to_string(line_no) +
                               " is not valid JSON: " + e.what());
        }
        preds[j.at("id").get<std::string>()] = j.at("latex").get<std::string>();
    }
    return preds;
}

namespace {

struct RecordScore {
    bool scored = false;
    ComplexityClass bucket = ComplexityClass::Simple;
    double teds_value = 0.0;
    double teds_structure_value = 0.0;
    bool pred_compiled = false;
    double cwssim_value = 0.0;
    std::vector<std::string> warnings;
};

RecordScore score_record(const CorpusRecord& rec, const std::string& pred_latex,
                         const Renderer* renderer) {
    RecordScore score;
    score.bucket = rec.complexity;

    StructTree gt_tree;
    try {
        gt_tree = to_structure_tree(parse_tabular({rec.gt_latex, std::nullopt}));
    } catch (const ParseError& e) {
        score.warnings.push_back("corpus record " + rec.id +
                                 " violates the parse invariant: " + e.what());
        return score;
    }
    score.scored = true;

    try {
        StructTree pred_tree = to_structure_tree(parse_tabular({pred_latex, std::nullopt}));
        score.teds_value = teds(pred_tree, gt_tree).similarity;
        score.teds_structure_value = teds_structure(pred_tree, gt_tree).similarity;
    } catch (const ParseError&) {
        // Failure-to-parse contributes zero to both means.
    }

    if (renderer) {
        std::optional<GrayImage> gt_image;
        if (!rec.gt_image.empty()) {
            try {
                gt_image = load_png_gray(rec.gt_image);
            } catch (const PngError& e) {
                score.warnings.push_back("record " + rec.id + ": " + e.what());
            }
        }
        if (!gt_image) {
            RenderResult gt_render = renderer->render({rec.gt_latex, std::nullopt});
            if (gt_render.compile_ok)
                gt_image = std::move(gt_render.image);
            else
                score.warnings.push_back("record " + rec.id + ": ground-truth render failed");
        }
        RenderResult pred_render = renderer->render({pred_latex, std::nullopt});
        score.pred_compiled = pred_render.compile_ok;
        if (pred_render.compile_ok && gt_image)
            score.cwssim_value = cw_ssim(*pred_render.image, *gt_image);
    }
    return score;
}

} // namespace

MetricReport evaluate(const std::string& predictions_path, const std::string& corpus_path,
                      const HarnessConfig& cfg, const Renderer* renderer) {
    std::vector<CorpusRecord> corpus = load_corpus(corpus_path);
    std::map<std::string, std::string> predictions = load_predictions(predictions_path);

    MetricReport report;
    report.visual_present = renderer != nullptr;

    // Bucket filter from config, kept in canonical order.
    std::vector<std::string> bucket_order;
    for (const char* name : {"simple", "medium", "complex"})
        if (std::find(cfg.buckets.begin(), cfg.buckets.end(), name) != cfg.buckets.end())
            bucket_order.emplace_back(name);

    std::vector<const CorpusRecord*> selected;
    std::vector<const std::string*> selected_preds;
    std::map<std::string, bool> matched;
    for (const CorpusRecord& rec : corpus) {
        if (std::find(bucket_order.begin(), bucket_order.end(), to_string(rec.complexity)) ==
            bucket_order.end())
            continue;
        auto it = predictions.find(rec.id);
        if (it == predictions.end()) {
            ++report.id_mismatches;
            report.warnings.push_back("no prediction for corpus id " + rec.id);
            continue;
        }
        matched[rec.id] = true;
        selected.push_back(&rec);
        selected_preds.push_back(&it->second);
    }
    for (const auto& [id, latex] : predictions) {
        (void)latex;
        if (!matched.count(id)) {
            ++report.id_mismatches;
            report.warnings.push_back("prediction id not in corpus (or filtered): " + id);
        }
    }

    std::vector<RecordScore> scores(selected.size());
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::atomic<size_t> next{0};
    std::atomic<bool> stop{false};
    auto work = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= selected.size() || stop.load())
                return;
            try {
                scores[i] = score_record(*selected[i], *selected_preds[i], renderer);
            } catch (...) {
                stop.store(true);
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                return;
            }
        }
    };
    unsigned workers = cfg.parallelism > 0 ? static_cast<unsigned>(cfg.parallelism)
                                           : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(std::max(1u, workers), std::max<size_t>(selected.size(), 1));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back(work);
    for (std::thread& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);

    // Ordered reduction over record index.
    struct Accum {
        long count = 0;
        double cwssim = 0, teds_v = 0, teds_s = 0;
        long compiled = 0;
    };
    std::map<std::string, Accum> accum;
    for (const RecordScore& s : scores) {
        for (const std::string& w : s.warnings)
            report.warnings.push_back(w);
        if (!s.scored)
            continue;
        ++report.scored;
        Accum& a = accum[to_string(s.bucket)];
        ++a.count;
        a.teds_v += s.teds_value;
        a.teds_s += s.teds_structure_value;
        a.cwssim += s.cwssim_value;
        a.compiled += s.pred_compiled ? 1 : 0;
    }
    for (const std::string& name : bucket_order) {
        BucketStats stats;
        stats.name = name;
        const Accum& a = accum[name];
        stats.count = a.count;
        if (a.count > 0) {
            stats.mean_teds = a.teds_v / a.count;
            stats.mean_teds_structure = a.teds_s / a.count;
            stats.mean_cwssim = a.cwssim / a.count;
            stats.compile_ratio = static_cast<double>(a.compiled) / a.count;
        }
        report.buckets.push_back(stats);
    }
    return report;
}

std::string format_report_table(const MetricReport& report) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof(line), "%-10s %7s %10s %10s %10s %10s\n", "bucket", "count",
                  "cw-ssim", "compile", "teds", "teds-s");
    os << line;
    auto cell = [&](double v) -> std::string {
        if (!report.visual_present)
            return "-";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", round_to(v, 4));
        return buf;
    };
    for (const BucketStats& b : report.buckets) {
        char t1[32], t2[32];
        std::snprintf(t1, sizeof(t1), "%.4f", round_to(b.mean_teds, 4));
        std::snprintf(t2, sizeof(t2), "%.4f", round_to(b.mean_teds_structure, 4));
        std::snprintf(line, sizeof(line), "%-10s %7ld %10s %10s %10s %10s\n", b.name.c_str(),
                      b.count, cell(b.mean_cwssim).c_str(), cell(b.compile_ratio).c_str(), t1, t2);
        os << line;
    }
    std::snprintf(line, sizeof(line), "scored=%ld id_mismatches=%ld\n", report.scored,
                  report.id_mismatches);
    os << line;
    return os.str();
}

std::string report_to_json(const MetricReport& report) {
    ordered_json root;
    root["visual_present"] = report.visual_present;
    root["scored"] = report.scored;
    root["id_mismatches"] = report.id_mismatches;
    root["buckets"] = json::array();
    for (const BucketStats& b : report.buckets) {
        ordered_json jb;
        jb["name"] = b.name;
        jb["count"] = b.count;
        if (report.visual_present) {
            jb["mean_cwssim"] = round_to(b.mean_cwssim, 4);
            jb["compile_ratio"] = round_to(b.compile_ratio, 4);
        } else {
            jb["mean_cwssim"] = nullptr;
            jb["compile_ratio"] = nullptr;
        }
        jb["mean_teds"] = round_to(b.mean_teds, 4);
        jb["mean_teds_structure"] = round_to(b.mean_teds_structure, 4);
        root["buckets"].push_back(jb);
    }
    root["warnings"] = report.warnings;
    return root.dump(2);
}

RewardRunSummary reward_run(const std::string& corpus_path, const std::string& candidates_path,
                            const std::string& output_path, const HarnessConfig& cfg,
                            const Renderer* renderer) {
    std::vector<CorpusRecord> corpus = load_corpus(corpus_path);
    std::map<std::string, const CorpusRecord*> by_id;
    for (const CorpusRecord& rec : corpus)
        by_id[rec.id] = &rec;

    std::ifstream in(candidates_path, std::ios::binary);
    if (!in)
        throw HarnessError("cannot open candidates: " + candidates_path);
    std::ofstream out(output_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw HarnessError("cannot open reward output: " + output_path);

    RewardRunSummary summary;
    const Renderer* active_renderer = renderer;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw HarnessError("candidates line " + std::to_string(line_no) +
                               " is not valid JSON: " + e.what());
        }
        std::string id = j.at("id").get<std::string>();
        std::vector<std::string> candidates;
        for (const auto& c : j.at("candidates"))
            candidates.push_back(c.get<std::string>());

        auto rec_it = by_id.find(id);
        if (rec_it == by_id.end()) {
            summary.warnings.push_back("candidates id not in corpus: " + id);
            ++summary.skipped_groups;
            continue;
        }
        if (candidates.size() < 2) {
            summary.warnings.push_back("group " + id +
                                       " has fewer than 2 candidates; skipped");
            ++summary.skipped_groups;
            continue;
        }
        const CorpusRecord& rec = *rec_it->second;

        std::optional<GrayImage> gt_image;
        if (!rec.gt_image.empty()) {
            try {
                gt_image = load_png_gray(rec.gt_image);
            } catch (const PngError& e) {
                summary.warnings.push_back("group " + id + ": " + e.what());
            }
        }
        RewardGroup group = score_group(id, {rec.gt_latex, std::nullopt}, gt_image, candidates,
                                        cfg.thresholds, active_renderer, cfg.parallelism);
        for (const std::string& w : group.warnings)
            summary.warnings.push_back("group " + id + ": " + w);

        std::vector<double> rewards;
        rewards.reserve(group.outcomes.size());
        for (const CandidateOutcome& o : group.outcomes)
            rewards.push_back(o.combined_reward);
        std::vector<double> adv = advantages(rewards);

        for (size_t i = 0; i < group.outcomes.size(); ++i) {
            const CandidateOutcome& o = group.outcomes[i];
            ordered_json rec_json;
            rec_json["image_id"] = id;
            rec_json["candidate_id"] = o.candidate_id;
            rec_json["compile_ok"] = o.compile_ok;
            rec_json["convert_ok"] = o.convert_ok;
            rec_json["cwssim"] = round_or_null(o.cwssim_value, 6);
            rec_json["teds_structure"] = round_or_null(o.teds_structure_value, 6);
            rec_json["visual_reward"] = o.visual_reward;
            rec_json["structure_reward"] = o.structure_reward;
            rec_json["combined_reward"] = o.combined_reward;
            rec_json["advantage"] = round_to(adv[i], 6);
            out << rec_json.dump() << "\n";
            char key[16];
            std::snprintf(key, sizeof(key), "%g", o.combined_reward);
            ++summary.reward_histogram[key];
            ++summary.candidates;
        }
        ++summary.groups;
    }
    return summary;
}

std::string reward_summary_to_json(const RewardRunSummary& summary) {
    ordered_json root;
    root["groups"] = summary.groups;
    root["skipped_groups"] = summary.skipped_groups;
    root["candidates"] = summary.candidates;
    root["reward_histogram"] = summary.reward_histogram;
    root["warnings"] = summary.warnings;
    return root.dump(2);
}

std::string build_summary_to_json(const BuildSummary& summary) {
    ordered_json root;
    root["files"] = summary.files;
    root["tables"] = summary.tables;
    root["skipped"] = summary.skipped;
    root["by_class"] = summary.by_class;
    root["warnings"] = summary.warnings;
    return root.dump(2);
}

std::string metric_pair_json(const std::string& pred_latex, const std::string& gt_latex,
                             const std::string& pred_image_png, const std::string& gt_image_png,
                             const HarnessConfig& cfg, const Renderer* renderer) {
    ordered_json root;
    StructTree gt_tree = to_structure_tree(parse_tabular({gt_latex, std::nullopt}));
    root["gt_nodes"] = node_count(gt_tree);

    std::optional<StructTree> pred_tree;
    try {
        pred_tree = to_structure_tree(parse_tabular({pred_latex, std::nullopt}));
    } catch (const ParseError& e) {
        root["convert_error"] = e.what();
    }
    root["convert_ok"] = pred_tree.has_value();
    if (pred_tree) {
        root["pred_nodes"] = node_count(*pred_tree);
        TedResult full = teds(*pred_tree, gt_tree);
        TedResult structure = teds_structure(*pred_tree, gt_tree);
        root["teds"] = round_to(full.similarity, 6);
        root["teds_structure"] = round_to(structure.similarity, 6);
        root["structure_reward"] =
            threshold_reward(structure.similarity, cfg.thresholds.teds_structure_threshold);
    } else {
        root["teds"] = 0.0;
        root["teds_structure"] = 0.0;
        root["structure_reward"] = 0;
    }

    std::optional<GrayImage> pred_image, gt_image;
    if (!pred_image_png.empty())
        pred_image = load_png_gray(pred_image_png);
    if (!gt_image_png.empty())
        gt_image = load_png_gray(gt_image_png);
    bool pred_compiled = pred_image.has_value();
    if (renderer) {
        if (!gt_image) {
            RenderResult r = renderer->render({gt_latex, std::nullopt});
            if (r.compile_ok)
                gt_image = std::move(r.image);
        }
        if (!pred_image) {
            RenderResult r = renderer->render({pred_latex, std::nullopt});
            pred_compiled = r.compile_ok;
            if (r.compile_ok)
                pred_image = std::move(r.image);
        }
    }
    if (pred_image && gt_image) {
        double value = cw_ssim(*pred_image, *gt_image);
        root["compile_ok"] = pred_compiled;
        root["cwssim"] = round_to(value, 6);
        root["visual_reward"] = threshold_reward(value, cfg.thresholds.cwssim_threshold);
    } else if (renderer || !pred_image_png.empty() || !gt_image_png.empty()) {
        root["compile_ok"] = pred_compiled;
        root["cwssim"] = nullptr;
        root["visual_reward"] = 0;
    } else {
        root["compile_ok"] = nullptr;
        root["cwssim"] = nullptr;
        root["visual_reward"] = nullptr;
    }
    return root.dump(2);
}

} // namespace tabscore
