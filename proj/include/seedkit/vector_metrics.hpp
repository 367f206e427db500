#pragma once

#include <span>
#include <vector>

#include "seedkit/types.hpp"

namespace seedkit {

/// dot(u,v) / (|u| |v|). Throws UndefinedError("undefined cosine") on a zero
/// vector, ValidationError on length mismatch or length < 2.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

/// Sample Pearson correlation, clamped to [-1, 1]. Throws UndefinedError("zero
/// variance") when either input is constant.
double pearson(std::span<const double> u, std::span<const double> v);

/// 1 - pearson(u, v).
double correlation_distance(std::span<const double> u, std::span<const double> v);

/// Composite: (object_f1 + cap_sim + effnet_bar) / 3.
double seed_score(double object_f1, double cap_sim, double effnet_bar);

/// Pearson correlation over all RGB samples of two equally sized images.
double pixcorr(const ImagePixels& gt, const ImagePixels& recon);

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
};

/// Mean SSIM over all valid (unpadded) window positions of the luma channel
/// (0.299 R + 0.587 G + 0.114 B), Gaussian window.
double ssim(const ImagePixels& gt, const ImagePixels& recon, const SsimParams& params = {});

struct TwoWayResult {
    double overall = 0;              // mean over ordered pairs (i, j != i)
    std::vector<double> per_image;   // win rate of image i against every other recon
};

/// For each i, compares corr(gt_i, recon_i) against corr(gt_i, recon_j) for
/// every j != i; a win counts 1, a tie 0.5.
TwoWayResult two_way_identification(const std::vector<std::vector<double>>& gt_embs,
                                    const std::vector<std::vector<double>>& recon_embs);

}  // namespace seedkit
