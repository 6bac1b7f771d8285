#include "render_bridge.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include <json.hpp>

#include "hash.hpp"
#include "png_io.hpp"
#include "subprocess.hpp"

namespace fs = std::filesystem;

namespace tabscore {

namespace {

struct TempDir {
    fs::path path;

    TempDir() {
        fs::path base = fs::temp_directory_path();
        for (int attempt = 0; attempt < 64; ++attempt) {
            fs::path candidate =
                base / ("tabscore-" +
                        content_hash(std::to_string(
                            std::chrono::steady_clock::now().time_since_epoch().count() + attempt)));
            std::error_code ec;
            if (fs::create_directory(candidate, ec)) {
                path = candidate;
                return;
            }
        }
        throw std::runtime_error("could not create a temporary render directory");
    }

    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

std::string tail(const std::string& text, size_t max_bytes = 2048) {
    if (text.size() <= max_bytes)
        return text;
    return text.substr(text.size() - max_bytes);
}

} // namespace

std::string PreambleTemplate::make_document(std::string_view tabular_body) const {
    std::string doc = document_class;
    doc += "\n";
    for (const std::string& pkg : packages) {
        doc += "\\usepackage{";
        doc += pkg;
        doc += "}\n";
    }
    doc += "\\begin{document}\n";
    doc += tabular_body;
    doc += "\n\\end{document}\n";
    return doc;
}

std::optional<GrayImage> crop_to_ink(const GrayImage& img, int margin, double ink_threshold) {
    int top = img.height, bottom = -1, left = img.width, right = -1;
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            if (img.at(r, c) < ink_threshold) {
                top = std::min(top, r);
                bottom = std::max(bottom, r);
                left = std::min(left, c);
                right = std::max(right, c);
            }
        }
    }
    if (bottom < 0)
        return std::nullopt; // blank page
    top = std::max(0, top - margin);
    left = std::max(0, left - margin);
    bottom = std::min(img.height - 1, bottom + margin);
    right = std::min(img.width - 1, right + margin);
    GrayImage out(right - left + 1, bottom - top + 1);
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c)
            out.at(r, c) = img.at(top + r, left + c);
    return out;
}

RenderBridge::RenderBridge(RenderConfig config) : config_(std::move(config)) {}

RenderResult RenderBridge::compile_latex(const TabularSource& src) const {
    RenderResult result;
    auto start = std::chrono::steady_clock::now();
    auto finish = [&]() {
        result.wall_time = std::chrono::steady_clock::now() - start;
        log_result(src, result);
    };

    TempDir dir;
    fs::path tex = dir.path / "table.tex";
    fs::path pdf = dir.path / "table.pdf";
    fs::path png = dir.path / "table.png";
    {
        std::ofstream out(tex);
        out << config_.preamble.make_document(src.raw);
    }
    std::map<std::string, std::string> vars = {
        {"dir", dir.path.string()},   {"tex", tex.string()},
        {"pdf", pdf.string()},        {"png", png.string()},
        {"png_base", (dir.path / "table").string()},
        {"dpi", std::to_string(config_.dpi)},
    };

    CommandResult compiled = run_command(
        split_command(substitute_placeholders(config_.compiler_command, vars)),
        dir.path.string(), config_.timeout_sec);
    if (compiled.spawn_failed)
        throw ToolchainUnavailable("LaTeX compiler unavailable: " + compiled.output);
    if (compiled.timed_out) {
        result.log_excerpt = "compile timed out after " + std::to_string(config_.timeout_sec) + "s";
        finish();
        return result;
    }
    if (compiled.exit_code != 0 || !fs::exists(pdf)) {
        result.log_excerpt = tail(compiled.output);
        finish();
        return result;
    }

    CommandResult rastered = run_command(
        split_command(substitute_placeholders(config_.raster_command, vars)),
        dir.path.string(), config_.timeout_sec);
    if (rastered.spawn_failed)
        throw ToolchainUnavailable("raster converter unavailable: " + rastered.output);
    if (rastered.timed_out || rastered.exit_code != 0 || !fs::exists(png)) {
        result.log_excerpt = rastered.timed_out ? "raster timed out" : tail(rastered.output);
        finish();
        return result;
    }

    GrayImage page;
    try {
        page = load_png_gray(png.string());
    } catch (const PngError& e) {
        result.log_excerpt = e.what();
        finish();
        return result;
    }
    std::optional<GrayImage> cropped = crop_to_ink(page, config_.margin_px);
    if (!cropped) {
        result.log_excerpt = "rendered page is blank";
        finish();
        return result;
    }
    if (!config_.image_dir.empty()) {
        std::error_code ec;
        fs::create_directories(config_.image_dir, ec);
        save_png_gray((fs::path(config_.image_dir) / (content_hash(src.raw) + ".png")).string(),
                      *cropped);
    }
    result.compile_ok = true;
    result.image = std::move(cropped);
    result.log_excerpt = tail(compiled.output, 512);
    finish();
    return result;
}

void RenderBridge::log_result(const TabularSource& src, const RenderResult& result) const {
    if (config_.log_path.empty())
        return;
    nlohmann::ordered_json line;
    std::string hash = content_hash(src.raw);
    line["source_hash"] = hash;
    line["compile_ok"] = result.compile_ok;
    line["wall_time_sec"] = std::round(result.wall_time.count() * 1e6) / 1e6;
    line["log_excerpt"] = result.log_excerpt;
    if (result.compile_ok && !config_.image_dir.empty())
        line["image"] = hash + ".png";
    else
        line["image"] = nullptr;
    std::lock_guard<std::mutex> lock(log_mutex_);
    std::ofstream out(config_.log_path, std::ios::binary | std::ios::app);
    out << line.dump() << "\n";
}

std::vector<RenderResult> RenderBridge::render_many(const std::vector<TabularSource>& sources) const {
    std::vector<RenderResult> results(sources.size());
    if (sources.empty())
        return results;

    unsigned workers = config_.parallelism > 0
                           ? static_cast<unsigned>(config_.parallelism)
                           : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, sources.size());

    std::atomic<size_t> next{0};
    std::atomic<bool> unavailable{false};
    auto work = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= sources.size() || unavailable.load())
                return;
            try {
                results[i] = compile_latex(sources[i]);
            } catch (const ToolchainUnavailable&) {
                unavailable.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back(work);
    for (std::thread& t : pool)
        t.join();
    if (unavailable.load())
        throw ToolchainUnavailable("LaTeX toolchain unavailable");
    return results;
}

bool RenderBridge::probe() const {
    std::vector<std::string> argv = split_command(config_.compiler_command);
    if (argv.empty())
        return false;
    CommandResult r = run_command({argv[0], "--version"}, "", 10.0);
    return !r.spawn_failed;
}

double compile_ratio(std::span<const RenderResult> results) {
    if (results.empty())
        throw std::invalid_argument("compile_ratio: empty result list");
    size_t ok = 0;
    for (const RenderResult& r : results)
        ok += r.compile_ok ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(results.size());
}

} // namespace tabscore
