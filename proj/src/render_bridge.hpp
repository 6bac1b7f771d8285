// render_bridge.hpp - drives an external LaTeX toolchain to rasterize tabular
// sources and reports compile success
#pragma once

#include <chrono>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gray_image.hpp"
#include "latex_parser.hpp"

namespace tabscore {

// Raised when the configured toolchain binaries cannot be spawned at all;
// distinct from an ordinary compile failure.
struct ToolchainUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RenderResult {
    bool compile_ok = false;
    std::optional<GrayImage> image; // present iff compile_ok
    std::string log_excerpt;
    std::chrono::duration<double> wall_time{0.0};
};

// Substituting any tabular body yields a complete standalone document.
struct PreambleTemplate {
    std::string document_class = "\\documentclass[border=8pt]{standalone}";
    std::vector<std::string> packages = {"multirow", "booktabs", "array",
                                         "amsmath", "amssymb", "graphicx"};

    std::string make_document(std::string_view tabular_body) const;
};

// Command templates take {dir}, {tex}, {pdf}, {png}, {png_base} and {dpi}
// placeholders and are split shell-style.
struct RenderConfig {
    std::string compiler_command =
        "pdflatex -interaction=nonstopmode -halt-on-error -output-directory {dir} {tex}";
    std::string raster_command = "pdftoppm -png -r {dpi} -gray -singlefile {pdf} {png_base}";
    int dpi = 200;
    int margin_px = 8;
    double timeout_sec = 20.0;
    int parallelism = 0; // 0 = logical cores
    PreambleTemplate preamble;
    std::string image_dir; // when set, cropped renders persist as <hash>.png
    std::string log_path;  // when set, one JSON line per render is appended
};

// Crops to the bounding box of pixels darker than `ink_threshold`, padded by
// `margin` and clamped to the image. Returns nothing for blank pages.
std::optional<GrayImage> crop_to_ink(const GrayImage& img, int margin, double ink_threshold = 250.0);

// Abstract rendering surface so reward scoring can run against the real
// bridge, a test double, or nothing at all.
class Renderer {
public:
    virtual ~Renderer() = default;
    virtual RenderResult render(const TabularSource& src) const = 0;
};

class RenderBridge : public Renderer {
public:
    explicit RenderBridge(RenderConfig config);

    // Wraps src in the preamble, compiles, rasterizes the first page and
    // crops to the ink bounding box. Nonzero exit, timeout, or a blank page
    // produce compile_ok=false; missing binaries throw ToolchainUnavailable.
    RenderResult compile_latex(const TabularSource& src) const;

    RenderResult render(const TabularSource& src) const override { return compile_latex(src); }

    // Bounded worker pool; results are keyed by input index.
    std::vector<RenderResult> render_many(const std::vector<TabularSource>& sources) const;

    // True when the compiler binary can be spawned.
    bool probe() const;

    const RenderConfig& config() const { return config_; }

private:
    void log_result(const TabularSource& src, const RenderResult& result) const;

    RenderConfig config_;
    mutable std::mutex log_mutex_;
};

// Fraction of results with compile_ok. Throws on an empty list.
double compile_ratio(std::span<const RenderResult> results);

} // namespace tabscore
