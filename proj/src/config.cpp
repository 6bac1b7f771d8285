#include "config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tabscore {

using nlohmann::json;

HarnessConfig HarnessConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    HarnessConfig cfg;
    cfg.merge_json_text(buf.str());
    return cfg;
}

void HarnessConfig::merge_json_text(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object())
        throw ConfigError("config root must be a JSON object");

    if (auto it = root.find("thresholds"); it != root.end()) {
        thresholds.cwssim_threshold = it->value("cwssim", thresholds.cwssim_threshold);
        thresholds.teds_structure_threshold =
            it->value("teds_structure", thresholds.teds_structure_threshold);
        for (double t : {thresholds.cwssim_threshold, thresholds.teds_structure_threshold})
            if (t < 0.0 || t > 1.0)
                throw ConfigError("reward thresholds must lie in [0, 1]");
    }
    if (auto it = root.find("grpo"); it != root.end()) {
        hyper.epsilon = it->value("epsilon", hyper.epsilon);
        hyper.beta = it->value("beta", hyper.beta);
        hyper.group_size = it->value("group_size", hyper.group_size);
        if (hyper.epsilon <= 0.0 || hyper.epsilon >= 1.0)
            throw ConfigError("grpo.epsilon must lie in (0, 1)");
        if (hyper.beta < 0.0)
            throw ConfigError("grpo.beta must be >= 0");
        if (hyper.group_size < 2)
            throw ConfigError("grpo.group_size must be >= 2");
    }
    if (auto it = root.find("render"); it != root.end()) {
        render.compiler_command = it->value("compiler", render.compiler_command);
        render.raster_command = it->value("raster", render.raster_command);
        render.dpi = it->value("dpi", render.dpi);
        render.margin_px = it->value("margin", render.margin_px);
        render.timeout_sec = it->value("timeout_sec", render.timeout_sec);
        render.parallelism = it->value("parallelism", render.parallelism);
        render.image_dir = it->value("image_dir", render.image_dir);
        render.log_path = it->value("log_path", render.log_path);
        render.preamble.document_class =
            it->value("document_class", render.preamble.document_class);
        if (auto pk = it->find("packages"); pk != it->end()) {
            render.preamble.packages.clear();
            for (const auto& p : *pk)
                render.preamble.packages.push_back(p.get<std::string>());
        }
        if (render.dpi <= 0 || render.timeout_sec <= 0.0)
            throw ConfigError("render.dpi and render.timeout_sec must be positive");
    }
    if (auto it = root.find("strip_list"); it != root.end())
        strip = StripList::from_file(it->get<std::string>());
    if (auto it = root.find("buckets"); it != root.end()) {
        buckets.clear();
        for (const auto& b : *it) {
            std::string name = b.get<std::string>();
            if (!complexity_from_string(name))
                throw ConfigError("unknown bucket name: " + name);
            buckets.push_back(std::move(name));
        }
        if (buckets.empty())
            throw ConfigError("buckets override must not be empty");
    }
    if (auto it = root.find("parallelism"); it != root.end())
        parallelism = it->get<int>();
}

std::string HarnessConfig::to_json_text() const {
    nlohmann::ordered_json root;
    root["thresholds"] = {{"cwssim", thresholds.cwssim_threshold},
                          {"teds_structure", thresholds.teds_structure_threshold}};
    root["grpo"] = {{"epsilon", hyper.epsilon},
                    {"beta", hyper.beta},
                    {"group_size", hyper.group_size}};
    root["render"] = {{"compiler", render.compiler_command},
                      {"raster", render.raster_command},
                      {"dpi", render.dpi},
                      {"margin", render.margin_px},
                      {"timeout_sec", render.timeout_sec},
                      {"parallelism", render.parallelism},
                      {"document_class", render.preamble.document_class},
                      {"packages", render.preamble.packages},
                      {"image_dir", render.image_dir},
                      {"log_path", render.log_path}};
    root["buckets"] = buckets;
    root["parallelism"] = parallelism;
    return root.dump(2);
}

} // namespace tabscore
