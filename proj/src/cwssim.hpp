// cwssim.hpp - monochrome-tuned CW-SSIM on a one-level 2x2 block Haar decomposition
#pragma once

#include "gray_image.hpp"

namespace tabscore {

// C1 = (K1*L)^2 = 6.5025 and C2 = (K2*L)^2 = 58.5225 under the defaults.
struct SsimConstants {
    double k1 = 0.01;
    double k2 = 0.03;
    double luminance_range = 255.0;

    double c1() const { return (k1 * luminance_range) * (k1 * luminance_range); }
    double c2() const { return (k2 * luminance_range) * (k2 * luminance_range); }
};

// The four subbands of a one-level block Haar transform. Each has half the
// source resolution per axis. The /4 normalization keeps the approximation
// band in [0, 255].
struct SubbandSet {
    GrayImage approx; // cA
    GrayImage horiz;  // cH
    GrayImage vert;   // cV
    GrayImage diag;   // cD
};

// Requires even dimensions. For a block p00 p01 / p10 p11:
//   cA = (p00+p01+p10+p11)/4   cH = (p00+p01-p10-p11)/4
//   cV = (p00-p01+p10-p11)/4   cD = (p00-p01-p10+p11)/4
SubbandSet haar_decompose(const GrayImage& img);

// Exact inverse of haar_decompose (p00 = cA+cH+cV+cD and so on).
GrayImage haar_reconstruct(const SubbandSet& bands);

// Global-statistics SSIM over one subband pair: population variance and
// covariance, single mean per subband.
double subband_ssim(const GrayImage& cx, const GrayImage& cy, const SsimConstants& k = {});

// Mean of the four subband SSIM scores after preprocess_pair. Symmetric in
// its arguments; 1.0 for identical inputs.
double cw_ssim(const GrayImage& x, const GrayImage& y, const SsimConstants& k = {});

} // namespace tabscore
