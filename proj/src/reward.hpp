// reward.hpp - dual binary rewards (visual + structural) for candidate groups
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwssim.hpp"
#include "render_bridge.hpp"
#include "tree_edit.hpp"

namespace tabscore {

struct RewardConfig {
    double cwssim_threshold = 0.6;
    double teds_structure_threshold = 0.9;
};

// 1 iff value strictly exceeds the threshold.
inline int threshold_reward(double value, double threshold) {
    return value > threshold ? 1 : 0;
}

// An absent render encodes compilation failure and scores 0.
int visual_reward(const std::optional<GrayImage>& pred_render, const GrayImage& gt_render,
                  const RewardConfig& cfg);

// Parse/convert failure of the prediction scores 0. The ground truth must
// parse; that is a corpus precondition and violating it throws.
int structure_reward(const TabularSource& pred_latex, const TabularSource& gt_latex,
                     const RewardConfig& cfg);

struct CandidateOutcome {
    int candidate_id = 0;
    bool compile_ok = false;
    bool convert_ok = false;
    std::optional<double> cwssim_value;
    std::optional<double> teds_structure_value;
    int visual_reward = 0;
    int structure_reward = 0;
    double combined_reward = 0.0; // visual + structure, in {0, 1, 2}
};

struct RewardGroup {
    std::string image_id;
    std::vector<CandidateOutcome> outcomes;
    std::vector<std::string> warnings; // group-level, e.g. renderer unavailable
};

// Scores every candidate against the ground truth: renders through the given
// renderer (nullptr disables visual rewards), parses for the structure
// reward, and combines. Candidates are evaluated concurrently but assembled
// in input order. The gt render may be supplied to skip rendering it.
RewardGroup score_group(const std::string& image_id, const TabularSource& gt_latex,
                        const std::optional<GrayImage>& gt_render,
                        const std::vector<std::string>& candidates, const RewardConfig& cfg,
                        const Renderer* renderer, int parallelism = 0);

} // namespace tabscore
