// config.hpp - harness configuration: thresholds, render settings, hyperparameters
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "grpo.hpp"
#include "latex_parser.hpp"
#include "render_bridge.hpp"
#include "reward.hpp"

namespace tabscore {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HarnessConfig {
    RewardConfig thresholds;
    HyperParams hyper;
    RenderConfig render;
    StripList strip = StripList::builtin();
    std::vector<std::string> buckets = {"simple", "medium", "complex"};
    int parallelism = 0; // 0 = logical cores

    static HarnessConfig from_file(const std::string& path);

    // Applies the keys present in a JSON object on top of current values.
    void merge_json_text(std::string_view text);

    std::string to_json_text() const;
};

} // namespace tabscore
