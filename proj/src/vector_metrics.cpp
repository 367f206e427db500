#include "seedkit/vector_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seedkit {

namespace {

void check_pair(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw ValidationError("vector length mismatch: " + std::to_string(u.size()) + " vs " +
                              std::to_string(v.size()));
    if (u.size() < 2) throw ValidationError("vectors need at least 2 entries");
}

double mean(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

void check_same_size(const ImagePixels& a, const ImagePixels& b) {
    if (a.width != b.width || a.height != b.height)
        throw ValidationError("image dimension mismatch for '" + a.image_id + "': " +
                              std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                              std::to_string(b.width) + "x" + std::to_string(b.height));
}

std::vector<double> luma(const ImagePixels& img) {
    std::vector<double> y(static_cast<std::size_t>(img.width) * img.height);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] + 0.114 * img.data[3 * i + 2];
    return y;
}

// Valid-mode separable filtering of a w x h plane with a 1-D kernel.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::vector<double>& k) {
    int n = static_cast<int>(k.size());
    int ow = w - n + 1, oh = h - n + 1;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0;
            for (int i = 0; i < n; ++i) s += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
            tmp[static_cast<std::size_t>(y) * ow + x] = s;
        }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0;
            for (int i = 0; i < n; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    return out;
}

}  // namespace

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    check_pair(u, v);
    double dot = 0, uu = 0, vv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0 || vv == 0) throw UndefinedError("undefined cosine: zero-norm vector");
    return std::clamp(dot / std::sqrt(uu * vv), -1.0, 1.0);
}

double pearson(std::span<const double> u, std::span<const double> v) {
    check_pair(u, v);
    double mu = mean(u), mv = mean(v);
    double suv = 0, suu = 0, svv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double a = u[i] - mu, b = v[i] - mv;
        suv += a * b;
        suu += a * a;
        svv += b * b;
    }
    if (suu == 0 || svv == 0) throw UndefinedError("zero variance");
    return std::clamp(suv / std::sqrt(suu * svv), -1.0, 1.0);
}

double correlation_distance(std::span<const double> u, std::span<const double> v) {
    return 1.0 - pearson(u, v);
}

double seed_score(double object_f1, double cap_sim, double effnet_bar) {
    return (object_f1 + cap_sim + effnet_bar) / 3.0;
}

double pixcorr(const ImagePixels& gt, const ImagePixels& recon) {
    check_same_size(gt, recon);
    std::vector<double> a(gt.data.begin(), gt.data.end()), b(recon.data.begin(), recon.data.end());
    return pearson(a, b);
}

double ssim(const ImagePixels& gt, const ImagePixels& recon, const SsimParams& p) {
    check_same_size(gt, recon);
    if (gt.width < p.window || gt.height < p.window)
        throw ValidationError("image too small for SSIM: " + std::to_string(gt.width) + "x" +
                              std::to_string(gt.height) + " < " + std::to_string(p.window) + "x" +
                              std::to_string(p.window));
    std::vector<double> kernel(p.window);
    double ksum = 0;
    int half = p.window / 2;
    for (int i = 0; i < p.window; ++i) {
        double d = i - half;
        kernel[i] = std::exp(-d * d / (2 * p.sigma * p.sigma));
        ksum += kernel[i];
    }
    for (double& k : kernel) k /= ksum;

    const int w = gt.width, h = gt.height;
    auto x = luma(gt), y = luma(recon);
    std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    auto mx = filter_valid(x, w, h, kernel), my = filter_valid(y, w, h, kernel);
    auto exx = filter_valid(xx, w, h, kernel), eyy = filter_valid(yy, w, h, kernel),
         exy = filter_valid(xy, w, h, kernel);

    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
    double total = 0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        double sxx = exx[i] - mx[i] * mx[i];
        double syy = eyy[i] - my[i] * my[i];
        double sxy = exy[i] - mx[i] * my[i];
        double num = (2 * mx[i] * my[i] + c1) * (2 * sxy + c2);
        double den = (mx[i] * mx[i] + my[i] * my[i] + c1) * (sxx + syy + c2);
        total += num / den;
    }
    return total / static_cast<double>(mx.size());
}

TwoWayResult two_way_identification(const std::vector<std::vector<double>>& gt_embs,
                                    const std::vector<std::vector<double>>& recon_embs) {
    if (gt_embs.size() != recon_embs.size())
        throw ValidationError("two-way identification: GT and recon lists differ in length");
    const std::size_t n = gt_embs.size();
    if (n < 2) throw UndefinedError("no comparison pool: two-way identification needs n >= 2");
    TwoWayResult r;
    r.per_image.resize(n);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double own = pearson(gt_embs[i], recon_embs[i]);
        double wins = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double other = pearson(gt_embs[i], recon_embs[j]);
            wins += own > other ? 1.0 : (own == other ? 0.5 : 0.0);
        }
        total += wins;
        r.per_image[i] = wins / static_cast<double>(n - 1);
    }
    r.overall = total / static_cast<double>(n * (n - 1));
    return r;
}

}  // namespace seedkit
