// harness.hpp - corpus building, prediction scoring and reward runs
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "reward.hpp"

namespace tabscore {

struct HarnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One corpus entry. gt_latex is the cleaned tabular source and always parses;
// complexity is the classification of that parse.
struct CorpusRecord {
    std::string id;
    std::string gt_latex;
    ComplexityClass complexity = ComplexityClass::Simple;
    std::string gt_image; // optional PNG path, empty when absent
};

struct BuildSummary {
    long files = 0;
    long tables = 0;
    long skipped = 0;
    std::map<std::string, long> by_class;
    std::vector<std::string> warnings; // WARN-formatted lines
};

// extract -> clean -> parse -> classify over every .tex file under
// source_dir (recursive, path-sorted). Unparseable tables are skipped and
// counted. Output is JSON Lines, byte-identical across reruns.
BuildSummary build_corpus(const std::string& source_dir, const std::string& output_path,
                          const HarnessConfig& cfg);

std::vector<CorpusRecord> load_corpus(const std::string& path);

// id -> candidate LaTeX. Duplicate ids keep the last entry.
std::map<std::string, std::string> load_predictions(const std::string& path);

struct BucketStats {
    std::string name;
    long count = 0;
    double mean_cwssim = 0.0;
    double compile_ratio = 0.0;
    double mean_teds = 0.0;
    double mean_teds_structure = 0.0;
};

struct MetricReport {
    std::vector<BucketStats> buckets; // simple, medium, complex order (filtered)
    bool visual_present = false;      // false under --no-render
    long scored = 0;
    long id_mismatches = 0;
    std::vector<std::string> warnings;
};

// Scores a predictions file against a corpus. Parse failures contribute 0 to
// the TEDS means; render failures contribute 0 to CW-SSIM. A null renderer
// skips visual metrics entirely. Record-level parallel, deterministic
// aggregation.
MetricReport evaluate(const std::string& predictions_path, const std::string& corpus_path,
                      const HarnessConfig& cfg, const Renderer* renderer);

// Fixed-width report table, 4 decimal places; absent visual metrics print
// as dashes.
std::string format_report_table(const MetricReport& report);
std::string report_to_json(const MetricReport& report);

struct RewardRunSummary {
    long groups = 0;
    long skipped_groups = 0;
    long candidates = 0;
    std::map<std::string, long> reward_histogram; // combined reward value -> count
    std::vector<std::string> warnings;
};

// Scores candidate groups and appends per-candidate JSON Lines (outcome plus
// group-relative advantage) to output_path. Groups with fewer than two
// candidates are skipped with a warning.
RewardRunSummary reward_run(const std::string& corpus_path, const std::string& candidates_path,
                            const std::string& output_path, const HarnessConfig& cfg,
                            const Renderer* renderer);

std::string reward_summary_to_json(const RewardRunSummary& summary);
std::string build_summary_to_json(const BuildSummary& summary);

// Single-pair scoring for debugging; any of the image paths may be empty.
// Renders when a renderer is given and images are not supplied.
std::string metric_pair_json(const std::string& pred_latex, const std::string& gt_latex,
                             const std::string& pred_image_png, const std::string& gt_image_png,
                             const HarnessConfig& cfg, const Renderer* renderer);

// Shared rounding helper: half-away-from-zero at `decimals` places.
double round_to(double value, int decimals);

} // namespace tabscore
