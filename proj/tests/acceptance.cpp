// acceptance.cpp - end-to-end acceptance suite. Each criterion prints one
// PASS/FAIL line; the process exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "cwssim.hpp"
#include "grpo.hpp"
#include "harness.hpp"
#include "render_bridge.hpp"
#include "reward.hpp"
#include "structure_tree.hpp"
#include "subprocess.hpp"
#include "tree_edit.hpp"

#include "support/table_gen.hpp"
#include "support/ted_oracle.hpp"
#include "support/temp_dir.hpp"
#include "support/tree_gen.hpp"

using namespace tabscore;
using namespace tabscore::testsupport;

namespace {

#ifndef FAKE_LATEX_TOOL
#error "FAKE_LATEX_TOOL must point at the stub toolchain binary"
#endif
#ifndef TABSCORE_CLI
#error "TABSCORE_CLI must point at the command-line binary"
#endif

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
};

RenderConfig stub_toolchain_config() {
    RenderConfig cfg;
    cfg.compiler_command = std::string(FAKE_LATEX_TOOL) + " compile {tex} {pdf}";
    cfg.raster_command = std::string(FAKE_LATEX_TOOL) + " raster {pdf} {png}";
    cfg.timeout_sec = 30.0;
    return cfg;
}

// --- criterion 1: metric identities on 50 random tables -------------------

void criterion_metric_identities(Check& check) {
    std::mt19937 rng(20250801);
    TempDir sources;
    std::string doc;
    for (int i = 0; i < 50; ++i)
        doc += random_table(rng, 5, 5).latex + "\n\n";
    sources.file("tables.tex", doc);

    TempDir work;
    HarnessConfig cfg;
    cfg.render = stub_toolchain_config();
    std::string corpus_path = (work.path / "corpus.jsonl").string();
    BuildSummary built = build_corpus(sources.path.string(), corpus_path, cfg);
    check.expect(built.tables == 50, "expected 50 corpus records, got " +
                                         std::to_string(built.tables));

    std::string preds;
    for (const CorpusRecord& rec : load_corpus(corpus_path))
        preds += nlohmann::ordered_json{{"id", rec.id}, {"latex", rec.gt_latex}}.dump() + "\n";
    std::string preds_path = sources.file("preds.jsonl", preds).string();

    RenderBridge bridge(cfg.render);
    check.expect(bridge.probe(), "stub toolchain not runnable");
    MetricReport report = evaluate(preds_path, corpus_path, cfg, &bridge);
    check.expect(report.id_mismatches == 0, "id mismatches");
    check.expect(report.scored == 50, "scored " + std::to_string(report.scored));
    for (const BucketStats& b : report.buckets) {
        if (b.count == 0)
            continue;
        check.expect(std::abs(b.mean_cwssim - 1.0) < 1e-9,
                     b.name + " cwssim " + std::to_string(b.mean_cwssim));
        check.expect(b.compile_ratio == 1.0, b.name + " compile ratio");
        check.expect(std::abs(b.mean_teds - 1.0) < 1e-9, b.name + " teds");
        check.expect(std::abs(b.mean_teds_structure - 1.0) < 1e-9, b.name + " teds-structure");
    }
}

// --- criterion 2: Zhang-Shasha equals brute force ---------------------------

void criterion_ted_oracle(Check& check) {
    std::mt19937 rng(20250802);
    for (int trial = 0; trial < 200; ++trial) {
        StructTree a = random_struct_tree(rng, 6);
        StructTree b = random_struct_tree(rng, 6);
        double fast = tree_edit_distance(a, b, {CostMode::StructureOnly});
        double oracle = oracle_tree_edit_distance(a, b, CostMode::StructureOnly);
        if (fast != oracle) {
            check.expect(false, "pair " + std::to_string(trial) + ": zs=" + std::to_string(fast) +
                                    " oracle=" + std::to_string(oracle));
            return;
        }
    }
}

// --- criterion 3: TEDS-Structure worked example ----------------------------

void criterion_teds_worked_example(Check& check) {
    StructTree gt = to_structure_tree(
        parse_tabular({"\\begin{tabular}{cc}a&b\\\\c&d\\\\\\end{tabular}", std::nullopt}));
    check.expect(node_count(gt) == 7, "ground truth is not 7 nodes");
    StructTree pred = gt;
    pred.root.children.back().children.pop_back(); // drop one td
    TedResult r = teds_structure(pred, gt);
    check.expect(std::abs(r.similarity - (1.0 - 1.0 / 7.0)) < 1e-9,
                 "similarity " + std::to_string(r.similarity));
}

// --- criterion 4: CW-SSIM closed forms -------------------------------------

void criterion_cwssim_closed_forms(Check& check) {
    std::mt19937 rng(20250804);
    GrayImage img(48, 36);
    std::uniform_int_distribution<int> level(0, 255);
    for (double& p : img.pixels)
        p = level(rng);
    check.expect(std::abs(cw_ssim(img, img) - 1.0) < 1e-9, "identity");

    GrayImage white(32, 32, 255.0);
    GrayImage black(32, 32, 0.0);
    check.expect(std::abs(cw_ssim(white, black) - 0.750025) < 1e-6,
                 "white/black " + std::to_string(cw_ssim(white, black)));

    // Integer-valued pixels reconstruct bit-exactly.
    SubbandSet bands = haar_decompose(img);
    GrayImage back = haar_reconstruct(bands);
    bool exact = back.pixels == img.pixels;
    check.expect(exact, "haar round-trip not exact");
}

// --- criterion 5: GRPO math --------------------------------------------------

void criterion_grpo_math(Check& check) {
    std::vector<double> two = advantages(std::vector<double>{1.0, 0.0});
    check.expect(std::abs(two[0] - 1.0) < 1e-6 && std::abs(two[1] + 1.0) < 1e-6,
                 "advantages (1,0)");
    std::vector<double> three = advantages(std::vector<double>{2.0, 1.0, 0.0});
    check.expect(std::abs(three[0] - 1.2247448) < 1e-6 && std::abs(three[1]) < 1e-6 &&
                     std::abs(three[2] + 1.2247448) < 1e-6,
                 "advantages (2,1,0)");

    std::mt19937 rng(20250805);
    std::uniform_real_distribution<double> lp(-15.0, 0.0);
    for (int i = 0; i < 10000; ++i) {
        double ref = lp(rng);
        double cur = (i % 10 == 0) ? ref : lp(rng);
        double kl = kl_estimate(ref, cur);
        if (kl < 0.0 || (ref == cur && kl != 0.0) || (ref != cur && kl <= 0.0)) {
            check.expect(false, "kl estimator violated at (" + std::to_string(ref) + "," +
                                    std::to_string(cur) + ")");
            return;
        }
    }

    HyperParams hp;
    ToyPolicy policy = ToyPolicy::random(4, 3, rng);
    ToyBatch on_policy;
    std::vector<double> rewards;
    for (int i = 0; i < 6; ++i) {
        std::vector<int> seq = policy.sample(rng);
        on_policy.old_logps.push_back(policy.sequence_log_prob(seq));
        on_policy.ref_logps.push_back(on_policy.old_logps.back());
        on_policy.sequences.push_back(std::move(seq));
        rewards.push_back(i % 3);
    }
    on_policy.advantages = advantages(rewards);
    check.expect(std::abs(batch_objective(policy, on_policy, hp)) < 1e-12,
                 "objective not zero at cur=old=ref");

    // Analytic gradient vs central finite differences, off clip boundaries.
    int tested = 0;
    int failures = 0;
    while (tested < 100) {
        ToyPolicy old_policy = ToyPolicy::random(4, 3, rng);
        ToyPolicy ref_policy = ToyPolicy::random(4, 3, rng);
        ToyPolicy current = old_policy;
        std::normal_distribution<double> nudge(0.0, 0.1);
        for (double& l : current.raw_logits())
            l += nudge(rng);

        ToyBatch batch;
        std::vector<double> rs;
        for (int i = 0; i < 4; ++i) {
            std::vector<int> seq = old_policy.sample(rng);
            batch.old_logps.push_back(old_policy.sequence_log_prob(seq));
            batch.ref_logps.push_back(ref_policy.sequence_log_prob(seq));
            batch.sequences.push_back(std::move(seq));
            rs.push_back((i * 7) % 3);
        }
        batch.advantages = advantages(rs);

        bool near_boundary = false;
        for (size_t i = 0; i < batch.sequences.size(); ++i) {
            double rho =
                std::exp(current.sequence_log_prob(batch.sequences[i]) - batch.old_logps[i]);
            if (std::abs(rho - (1.0 - hp.epsilon)) < 1e-3 ||
                std::abs(rho - (1.0 + hp.epsilon)) < 1e-3)
                near_boundary = true;
        }
        if (near_boundary)
            continue;

        std::vector<double> grad = objective_gradient(current, batch, hp);
        std::uniform_int_distribution<int> pos_dist(0, current.length() - 1);
        std::uniform_int_distribution<int> v_dist(0, current.vocab() - 1);
        int pos = pos_dist(rng);
        int v = v_dist(rng);
        ToyPolicy plus = current;
        plus.logit(pos, v) += 1e-5;
        ToyPolicy minus = current;
        minus.logit(pos, v) -= 1e-5;
        double numeric =
            (batch_objective(plus, batch, hp) - batch_objective(minus, batch, hp)) / 2e-5;
        double analytic = grad[static_cast<size_t>(pos) * current.vocab() + v];
        double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
        if (std::abs(analytic - numeric) / scale >= 1e-6)
            ++failures;
        ++tested;
    }
    check.expect(failures == 0,
                 std::to_string(failures) + "/100 gradient checks exceeded 1e-6 relative error");
}

// --- criterion 6: reward threshold boundaries -------------------------------

void criterion_reward_thresholds(Check& check) {
    RewardConfig cfg; // defaults 0.6 / 0.9
    check.expect(cfg.cwssim_threshold == 0.6 && cfg.teds_structure_threshold == 0.9,
                 "defaults are not 0.6/0.9");
    check.expect(threshold_reward(0.6 + 1e-9, cfg.cwssim_threshold) == 1, "cwssim just above");
    check.expect(threshold_reward(0.6 - 1e-9, cfg.cwssim_threshold) == 0, "cwssim just below");
    check.expect(threshold_reward(0.6, cfg.cwssim_threshold) == 0, "cwssim exactly at");
    check.expect(threshold_reward(0.9 + 1e-9, cfg.teds_structure_threshold) == 1,
                 "teds-structure just above");
    check.expect(threshold_reward(0.9 - 1e-9, cfg.teds_structure_threshold) == 0,
                 "teds-structure just below");
    check.expect(threshold_reward(0.9, cfg.teds_structure_threshold) == 0,
                 "teds-structure exactly at");

    GrayImage gt(16, 16, 255.0);
    check.expect(visual_reward(std::nullopt, gt, cfg) == 0, "compile failure must score 0");
    TabularSource good{"\\begin{tabular}{c}x\\\\\\end{tabular}", std::nullopt};
    TabularSource broken{"\\begin{tabular}{c}{x\\\\\\end{tabular}", std::nullopt};
    check.expect(structure_reward(broken, good, cfg) == 0, "convert failure must score 0");
    check.expect(structure_reward(good, good, cfg) == 1, "identity must score 1");
}

// --- criterion 7: classifier decision table ---------------------------------

void criterion_classifier_table(Check& check) {
    struct Case {
        int rows, cols, spans;
        ComplexityClass expected;
    };
    const Case cases[] = {
        {9, 11, 0, ComplexityClass::Simple},  {9, 11, 1, ComplexityClass::Simple},
        {9, 11, 2, ComplexityClass::Simple},  {10, 12, 0, ComplexityClass::Simple},
        {10, 12, 1, ComplexityClass::Simple}, {10, 12, 2, ComplexityClass::Medium},
        {7, 23, 0, ComplexityClass::Complex}, {7, 23, 1, ComplexityClass::Complex},
        {7, 23, 2, ComplexityClass::Complex},
    };
    for (const Case& c : cases) {
        TableModel m;
        m.n_rows = c.rows;
        m.n_cols = c.cols;
        ComplexityClass got = classify_complexity(m, c.spans);
        if (got != c.expected) {
            check.expect(false, std::to_string(c.rows * c.cols) + " cells, " +
                                    std::to_string(c.spans) + " spans -> " + to_string(got));
        }
    }
}

// --- criterion 8: parser coverage invariant ---------------------------------

void criterion_parser_coverage(Check& check) {
    std::mt19937 rng(20250808);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        GeneratedTable g = random_table(rng, 6, 6, 0.35);
        try {
            TableModel m = parse_tabular({g.latex, std::nullopt});
            std::string why;
            if (!full_coverage(m, &why))
                ++violations;
        } catch (const ParseError&) {
            ++violations;
        }
    }
    check.expect(violations == 0, std::to_string(violations) + " coverage violations");
}

// --- criterion 9: degraded-mode CLI run --------------------------------------

void criterion_degraded_cli(Check& check) {
    TempDir sources;
    sources.file("t.tex", "\\begin{tabular}{cc}a&b\\\\c&d\\\\\\end{tabular}\n");
    TempDir work;
    HarnessConfig cfg;
    std::string corpus_path = (work.path / "corpus.jsonl").string();
    build_corpus(sources.path.string(), corpus_path, cfg);

    std::string preds;
    for (const CorpusRecord& rec : load_corpus(corpus_path))
        preds += nlohmann::ordered_json{{"id", rec.id}, {"latex", rec.gt_latex}}.dump() + "\n";
    std::string preds_path = sources.file("preds.jsonl", preds).string();
    std::string report_path = (work.path / "report.json").string();

    CommandResult run = run_command({TABSCORE_CLI, "--no-render", "evaluate", preds_path,
                                     corpus_path, "--report", report_path},
                                    "", 60.0);
    check.expect(!run.spawn_failed, "CLI did not spawn");
    check.expect(run.exit_code == 0, "exit code " + std::to_string(run.exit_code));

    std::ifstream in(report_path);
    check.expect(in.good(), "report not written");
    nlohmann::json report = nlohmann::json::parse(in, nullptr, false);
    check.expect(!report.is_discarded(), "report is not valid JSON");
    if (!report.is_discarded()) {
        check.expect(report["visual_present"] == false, "visual metrics not marked absent");
        bool found = false;
        for (const auto& b : report["buckets"]) {
            if (b["count"].get<long>() > 0) {
                found = true;
                check.expect(b["mean_cwssim"].is_null(), "cwssim should be absent");
                check.expect(b["mean_teds"] == 1.0, "teds should be 1.0");
                check.expect(b["mean_teds_structure"] == 1.0, "teds-structure should be 1.0");
            }
        }
        check.expect(found, "no scored bucket in report");
    }
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<void(Check&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "metric identities on 50 random tables (stub toolchain)", criterion_metric_identities},
        {2, "tree edit distance equals brute-force oracle (200 pairs)", criterion_ted_oracle},
        {3, "TEDS-Structure worked example 1 - 1/7", criterion_teds_worked_example},
        {4, "CW-SSIM closed forms and Haar round-trip", criterion_cwssim_closed_forms},
        {5, "GRPO advantages, KL estimator, objective and gradients", criterion_grpo_math},
        {6, "reward threshold boundary cases (0.6 / 0.9)", criterion_reward_thresholds},
        {7, "complexity classifier decision table", criterion_classifier_table},
        {8, "parser full-coverage invariant (1000 layouts)", criterion_parser_coverage},
        {9, "degraded-mode evaluate via the CLI (--no-render)", criterion_degraded_cli},
    };

    int failed = 0;
    for (const Criterion& criterion : criteria) {
        auto start = std::chrono::steady_clock::now();
        Check check;
        try {
            criterion.run(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ostringstream line;
        line << (check.ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion.id << ": "
             << criterion.name << " (" << std::fixed << std::setprecision(2) << seconds << "s)";
        if (!check.ok)
            line << " -- " << check.detail.str();
        std::cout << line.str() << std::endl;
        failed += check.ok ? 0 : 1;
    }
    if (failed == 0)
        std::cout << "all " << criteria.size() << " acceptance criteria passed" << std::endl;
    else
        std::cout << failed << " of " << criteria.size() << " acceptance criteria FAILED"
                  << std::endl;
    return failed == 0 ? 0 : 1;
}
