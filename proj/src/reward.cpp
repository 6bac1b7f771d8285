#include "reward.hpp"

#include <atomic>
#include <thread>

namespace tabscore {

int visual_reward(const std::optional<GrayImage>& pred_render, const GrayImage& gt_render,
                  const RewardConfig& cfg) {
    if (!pred_render)
        return 0;
    return threshold_reward(cw_ssim(*pred_render, gt_render), cfg.cwssim_threshold);
}

int structure_reward(const TabularSource& pred_latex, const TabularSource& gt_latex,
                     const RewardConfig& cfg) {
    StructTree gt_tree = to_structure_tree(parse_tabular(gt_latex));
    StructTree pred_tree;
    try {
        pred_tree = to_structure_tree(parse_tabular(pred_latex));
    } catch (const ParseError&) {
        return 0;
    }
    return threshold_reward(teds_structure(pred_tree, gt_tree).similarity,
                            cfg.teds_structure_threshold);
}

RewardGroup score_group(const std::string& image_id, const TabularSource& gt_latex,
                        const std::optional<GrayImage>& gt_render,
                        const std::vector<std::string>& candidates, const RewardConfig& cfg,
                        const Renderer* renderer, int parallelism) {
    RewardGroup group;
    group.image_id = image_id;
    group.outcomes.resize(candidates.size());

    const StructTree gt_tree = to_structure_tree(parse_tabular(gt_latex));

    // Resolve the ground-truth render once; candidates reuse it.
    std::optional<GrayImage> gt_image = gt_render;
    const Renderer* active_renderer = renderer;
    if (!gt_image && active_renderer) {
        try {
            RenderResult r = active_renderer->render(gt_latex);
            if (r.compile_ok)
                gt_image = std::move(r.image);
            else
                group.warnings.push_back("ground-truth render failed; visual rewards disabled: " +
                                         r.log_excerpt);
        } catch (const ToolchainUnavailable& e) {
            group.warnings.push_back(std::string("renderer unavailable; visual rewards set to 0: ") +
                                     e.what());
            active_renderer = nullptr;
        }
    }
    if (renderer == nullptr)
        group.warnings.push_back("rendering disabled; visual rewards set to 0");

    std::atomic<bool> renderer_down{false};
    auto score_candidate = [&](size_t idx) {
        CandidateOutcome& outcome = group.outcomes[idx];
        outcome.candidate_id = static_cast<int>(idx);
        TabularSource pred{candidates[idx], std::nullopt};

        // Structure reward: parse in-process; any failure is reward 0.
        try {
            StructTree pred_tree = to_structure_tree(parse_tabular(pred));
            outcome.convert_ok = true;
            outcome.teds_structure_value = teds_structure(pred_tree, gt_tree).similarity;
            outcome.structure_reward =
                threshold_reward(*outcome.teds_structure_value, cfg.teds_structure_threshold);
        } catch (const ParseError&) {
            outcome.convert_ok = false;
        }

        // Visual reward: render and compare when a gt image is available.
        if (gt_image && active_renderer && !renderer_down.load()) {
            try {
                RenderResult r = active_renderer->render(pred);
                outcome.compile_ok = r.compile_ok;
                if (r.compile_ok) {
                    outcome.cwssim_value = cw_ssim(*r.image, *gt_image);
                    outcome.visual_reward =
                        threshold_reward(*outcome.cwssim_value, cfg.cwssim_threshold);
                }
            } catch (const ToolchainUnavailable&) {
                renderer_down.store(true);
            }
        }
        outcome.combined_reward = outcome.visual_reward + outcome.structure_reward;
    };

    unsigned workers = parallelism > 0 ? static_cast<unsigned>(parallelism)
                                       : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, candidates.size());
    if (workers <= 1) {
        for (size_t i = 0; i < candidates.size(); ++i)
            score_candidate(i);
    } else {
        std::atomic<size_t> next{0};
        auto work = [&]() {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= candidates.size())
                    return;
                score_candidate(i);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (std::thread& t : pool)
            t.join();
    }
    if (renderer_down.load()) {
        // Partial visual coverage would skew the group; zero it all.
        for (CandidateOutcome& outcome : group.outcomes) {
            outcome.compile_ok = false;
            outcome.cwssim_value.reset();
            outcome.visual_reward = 0;
            outcome.combined_reward = outcome.structure_reward;
        }
        group.warnings.push_back("renderer became unavailable mid-group; visual rewards set to 0");
    }
    return group;
}

} // namespace tabscore
