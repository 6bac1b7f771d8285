#include "cwssim.hpp"

#include <functional>
#include <stdexcept>

namespace tabscore {

namespace {

// Fixed pairwise reduction so sums are reproducible regardless of how callers
// parallelize around this module.
double pairwise_sum(const std::vector<double>& v, size_t begin, size_t end,
                    const std::function<double(double)>& term) {
    if (end - begin <= 8) {
        double s = 0.0;
        for (size_t i = begin; i < end; ++i)
            s += term(v[i]);
        return s;
    }
    size_t mid = begin + (end - begin) / 2;
    return pairwise_sum(v, begin, mid, term) + pairwise_sum(v, mid, end, term);
}

double pairwise_sum2(const std::vector<double>& a, const std::vector<double>& b, size_t begin,
                     size_t end, const std::function<double(double, double)>& term) {
    if (end - begin <= 8) {
        double s = 0.0;
        for (size_t i = begin; i < end; ++i)
            s += term(a[i], b[i]);
        return s;
    }
    size_t mid = begin + (end - begin) / 2;
    return pairwise_sum2(a, b, begin, mid, term) + pairwise_sum2(a, b, mid, end, term);
}

} // namespace

SubbandSet haar_decompose(const GrayImage& img) {
    if (img.width % 2 != 0 || img.height % 2 != 0)
        throw std::invalid_argument("haar_decompose requires even dimensions");
    const int hw = img.width / 2;
    const int hh = img.height / 2;
    SubbandSet bands{GrayImage(hw, hh), GrayImage(hw, hh), GrayImage(hw, hh), GrayImage(hw, hh)};
    for (int r = 0; r < hh; ++r) {
        for (int c = 0; c < hw; ++c) {
            double p00 = img.at(2 * r, 2 * c);
            double p01 = img.at(2 * r, 2 * c + 1);
            double p10 = img.at(2 * r + 1, 2 * c);
            double p11 = img.at(2 * r + 1, 2 * c + 1);
            bands.approx.at(r, c) = (p00 + p01 + p10 + p11) / 4.0;
            bands.horiz.at(r, c) = (p00 + p01 - p10 - p11) / 4.0;
            bands.vert.at(r, c) = (p00 - p01 + p10 - p11) / 4.0;
            bands.diag.at(r, c) = (p00 - p01 - p10 + p11) / 4.0;
        }
    }
    return bands;
}

GrayImage haar_reconstruct(const SubbandSet& bands) {
    const int hw = bands.approx.width;
    const int hh = bands.approx.height;
    GrayImage img(hw * 2, hh * 2);
    for (int r = 0; r < hh; ++r) {
        for (int c = 0; c < hw; ++c) {
            double a = bands.approx.at(r, c);
            double h = bands.horiz.at(r, c);
            double v = bands.vert.at(r, c);
            double d = bands.diag.at(r, c);
            img.at(2 * r, 2 * c) = a + h + v + d;
            img.at(2 * r, 2 * c + 1) = a + h - v - d;
            img.at(2 * r + 1, 2 * c) = a - h + v - d;
            img.at(2 * r + 1, 2 * c + 1) = a - h - v + d;
        }
    }
    return img;
}

double subband_ssim(const GrayImage& cx, const GrayImage& cy, const SsimConstants& k) {
    if (cx.width != cy.width || cx.height != cy.height)
        throw std::invalid_argument("subband_ssim: dimension mismatch");
    const size_t n = cx.pixels.size();
    if (n == 0)
        throw std::invalid_argument("subband_ssim: empty subband");

    const double inv_n = 1.0 / static_cast<double>(n);
    const double mu_x = pairwise_sum(cx.pixels, 0, n, [](double v) { return v; }) * inv_n;
    const double mu_y = pairwise_sum(cy.pixels, 0, n, [](double v) { return v; }) * inv_n;
    // Two-pass population statistics.
    const double var_x =
        pairwise_sum(cx.pixels, 0, n, [mu_x](double v) { return (v - mu_x) * (v - mu_x); }) * inv_n;
    const double var_y =
        pairwise_sum(cy.pixels, 0, n, [mu_y](double v) { return (v - mu_y) * (v - mu_y); }) * inv_n;
    const double cov = pairwise_sum2(cx.pixels, cy.pixels, 0, n,
                                     [mu_x, mu_y](double a, double b) {
                                         return (a - mu_x) * (b - mu_y);
                                     }) *
                       inv_n;

    const double c1 = k.c1();
    const double c2 = k.c2();
    return ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)) /
           ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2));
}

double cw_ssim(const GrayImage& x, const GrayImage& y, const SsimConstants& k) {
    auto [a, b] = preprocess_pair(x, y);
    SubbandSet ba = haar_decompose(a);
    SubbandSet bb = haar_decompose(b);
    double total = subband_ssim(ba.approx, bb.approx, k) + subband_ssim(ba.horiz, bb.horiz, k) +
                   subband_ssim(ba.vert, bb.vert, k) + subband_ssim(ba.diag, bb.diag, k);
    return total / 4.0;
}

} // namespace tabscore
