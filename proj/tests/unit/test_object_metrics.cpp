#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "seedkit/object_metrics.hpp"

using namespace seedkit;

namespace {

DetectionSet make(std::initializer_list<std::pair<const char*, double>> dets, Role role = Role::GT) {
    DetectionSet s;
    s.image_id = "img";
    s.role = role;
    for (auto& [c, v] : dets) s.detections.push_back({c, v, std::nullopt});
    s.canonicalize();
    return s;
}

DetectionSet with_boxes(std::initializer_list<std::tuple<const char*, double, BBox>> dets) {
    DetectionSet s;
    s.image_id = "img";
    for (auto& [c, v, b] : dets) s.detections.push_back({c, v, b});
    s.canonicalize();
    return s;
}

oracle::ConfMap conf_map(const DetectionSet& s) {
    oracle::ConfMap m;
    for (const auto& d : s.detections) m[d.category] = d.confidence;
    return m;
}

DetectionSet random_set(std::mt19937_64& rng, const std::vector<std::string>& cats, bool quantize) {
    std::uniform_int_distribution<int> count(0, 6);
    std::uniform_real_distribution<double> conf(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(cats.size()) - 1);
    DetectionSet s;
    int n = count(rng);
    for (int i = 0; i < n; ++i) {
        double c = conf(rng);
        if (quantize) c = std::round(c * 100) / 100;
        s.detections.push_back({cats[pick(rng)], c, std::nullopt});
    }
    s.canonicalize();
    return s;
}

}  // namespace

TEST_CASE("detected_categories uses an inclusive threshold") {
    auto s = make({{"dog", 0.9}, {"cat", 0.5}});
    CHECK(detected_categories(s, 0.5) == std::set<std::string>{"cat", "dog"});
    CHECK(detected_categories(s, 0.51) == std::set<std::string>{"dog"});
    CHECK(detected_categories(make({}), 0.2).empty());
}

TEST_CASE("threshold grid samples") {
    ThresholdGrid g;
    auto s = g.samples(0.9);
    CHECK(s.size() == 91);
    CHECK(s.front() == 0.0);
    CHECK(s.back() == 0.9);
    CHECK(s[60] == 0.6);
    // Off-grid cutoff is sampled as well.
    auto off = g.samples(0.555);
    CHECK(off.size() == 57);
    CHECK(off[55] == 0.55);
    CHECK(off.back() == 0.555);
    CHECK(g.samples(0.0) == std::vector<double>{0.0});
    CHECK_THROWS_AS(ThresholdGrid{0.0}.samples(0.5), ValidationError);
}

TEST_CASE("object score: worked example") {
    auto gt = make({{"dog", 0.9}, {"cat", 0.5}});
    auto rc = make({{"dog", 0.6}, {"cat", 0.4}}, Role::RECON);
    auto s = object_recall_precision(gt, rc);
    const double recall = 56.0 / 91.0;
    CHECK(std::abs(s.recall - recall) < 1e-12);
    CHECK(std::abs(s.precision - 1.0) < 1e-12);
    CHECK(std::abs(s.f1 - 2 * recall / (1 + recall)) < 1e-12);
    CHECK_FALSE(s.degenerate());
}

TEST_CASE("object score: category swap scores zero") {
    auto s = object_recall_precision(make({{"sheep", 0.8}}), make({{"cow", 0.7}}, Role::RECON));
    CHECK(s.recall == 0.0);
    CHECK(s.precision == 0.0);
    CHECK(s.f1 == 0.0);
}

TEST_CASE("object score: identity is exactly 1") {
    std::mt19937_64 rng(7);
    std::vector<std::string> cats = {"dog", "cat", "car", "person", "bus", "cup"};
    for (int i = 0; i < 200; ++i) {
        auto s = random_set(rng, cats, i % 2 == 0);
        if (s.detections.empty()) continue;
        auto r = object_recall_precision(s, s);
        CHECK(r.recall == 1.0);
        CHECK(r.precision == 1.0);
        CHECK(r.f1 == 1.0);
    }
}

TEST_CASE("object score: degenerate inputs") {
    auto empty = make({});
    auto dog = make({{"dog", 0.8}});
    auto a = object_recall_precision(empty, dog);
    CHECK(a.recall_degenerate);
    CHECK_FALSE(a.precision_degenerate);
    CHECK(a.recall == 0.0);
    CHECK(a.f1 == 0.0);
    auto b = object_recall_precision(dog, empty);
    CHECK(b.precision_degenerate);
    CHECK(b.recall == 0.0);
    CHECK(b.f1 == 0.0);
    auto c = object_recall_precision(empty, empty);
    CHECK(c.degenerate());
    CHECK(c.f1 == 0.0);
}

TEST_CASE("object score matches the piecewise oracle and role-swap duality") {
    std::mt19937_64 rng(20240611);
    std::vector<std::string> cats = {"dog", "cat", "car", "person", "bus", "cup", "tv", "bed", "sink", "kite"};
    for (int i = 0; i < 300; ++i) {
        auto gt = random_set(rng, cats, i % 3 == 0);
        auto rc = random_set(rng, cats, i % 3 == 0);
        auto s = object_recall_precision(gt, rc);
        auto swapped = object_recall_precision(rc, gt);
        CHECK(s.recall == swapped.precision);
        CHECK(s.precision == swapped.recall);
        CHECK(s.f1 == swapped.f1);
        if (!gt.detections.empty())
            CHECK(std::abs(s.recall - oracle::piecewise_grid_average(conf_map(gt), conf_map(rc))) < 1e-9);
        if (!rc.detections.empty())
            CHECK(std::abs(s.precision - oracle::piecewise_grid_average(conf_map(rc), conf_map(gt))) < 1e-9);
        for (double v : {s.recall, s.precision, s.f1}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        if (s.recall > 0 && s.precision > 0) {
            CHECK(s.f1 >= std::min(s.recall, s.precision) - 1e-15);
            CHECK(s.f1 <= std::max(s.recall, s.precision) + 1e-15);
        }
    }
}

TEST_CASE("finer grid converges towards the integral") {
    std::mt19937_64 rng(99);
    std::vector<std::string> cats = {"dog", "cat", "car", "person", "bus"};
    for (int i = 0; i < 100; ++i) {
        auto gt = random_set(rng, cats, false);
        auto rc = random_set(rng, cats, false);
        if (gt.detections.empty()) continue;
        double coarse = object_recall_precision(gt, rc, ThresholdGrid{0.01}).recall;
        double fine = object_recall_precision(gt, rc, ThresholdGrid{0.001}).recall;
        std::set<double> distinct;
        for (const auto& d : gt.detections) distinct.insert(d.confidence);
        for (const auto& d : rc.detections) distinct.insert(d.confidence);
        CHECK(std::abs(coarse - fine) < 10 * 0.01 * static_cast<double>(distinct.size()));
    }
}

TEST_CASE("monotonicity at a fixed threshold") {
    auto gt = make({{"dog", 0.8}, {"cat", 0.6}, {"car", 0.5}});
    auto rc = make({{"dog", 0.7}}, Role::RECON);
    double t = 0.4;
    double r0 = threshold_recall(gt, rc, t), p0 = threshold_recall(rc, gt, t);
    auto more = rc;
    more.detections.push_back({"cat", 0.9, std::nullopt});
    more.canonicalize();
    CHECK(threshold_recall(gt, more, t) >= r0);
    auto extra = rc;
    extra.detections.push_back({"bus", 0.9, std::nullopt});
    extra.canonicalize();
    CHECK(threshold_recall(extra, gt, t) <= p0);
}

TEST_CASE("size and location weights") {
    CHECK(size_weight({0, 0, 1, 1}) == 2.0);
    CHECK(size_weight({0.5, 0.5, 0, 0}) == 1.0);
    CHECK(size_weight({0, 0, 0.5, 0.5}) == doctest::Approx(1.25));
    CHECK(location_weight({0.25, 0.25, 0.5, 0.5}) == 2.0);
    CHECK(location_weight({0.0, 0.0, 0.0, 0.0}) == doctest::Approx(1.0));
    // Center at (0.5, 0.0): d = 0.5, d_max = sqrt(0.5).
    CHECK(location_weight({0.5, 0.0, 0.0, 0.0}) == doctest::Approx(2.0 - 0.5 / std::sqrt(0.5)));
}

TEST_CASE("size weighting uses the denominator side's boxes") {
    // GT: big dog (weight 2), tiny cat (weight 1); recon only has the dog.
    auto gt = with_boxes({{"dog", 0.8, BBox{0, 0, 1, 1}}, {"cat", 0.8, BBox{0, 0, 0, 0}}});
    auto rc = with_boxes({{"dog", 0.8, BBox{0, 0, 0.5, 0.5}}});
    CHECK(threshold_recall(gt, rc, 0.5, WeightingMode::SIZE) == doctest::Approx(2.0 / 3.0));
    CHECK(threshold_recall(gt, rc, 0.5, WeightingMode::NONE) == doctest::Approx(0.5));
    CHECK(threshold_recall(rc, gt, 0.5, WeightingMode::SIZE) == 1.0);
    auto s = object_recall_precision(gt, rc, {}, WeightingMode::SIZE);
    auto sw = object_recall_precision(rc, gt, {}, WeightingMode::SIZE);
    CHECK(s.recall == sw.precision);
}

TEST_CASE("weighting without boxes is an error") {
    auto gt = make({{"dog", 0.8}});
    CHECK_THROWS_AS(object_recall_precision(gt, gt, {}, WeightingMode::SIZE), ValidationError);
    CHECK_THROWS_AS(object_recall_precision(gt, gt, {}, WeightingMode::LOCATION), ValidationError);
}

TEST_CASE("number weighting gives min/max partial credit") {
    auto gt = make({{"dog", 0.9}, {"dog", 0.8}});
    auto rc = make({{"dog", 0.9}}, Role::RECON);
    CHECK(gt.detections.size() == 1);
    CHECK(gt.instance_count("dog", 0.5) == 2);
    CHECK(threshold_recall(gt, rc, 0.5, WeightingMode::NUMBER) == 0.5);
    CHECK(threshold_recall(rc, gt, 0.5, WeightingMode::NUMBER) == 0.5);
    // Above 0.8 only one GT dog remains.
    CHECK(threshold_recall(gt, rc, 0.85, WeightingMode::NUMBER) == 1.0);
    CHECK(weighting_from_string("number") == WeightingMode::NUMBER);
    CHECK_THROWS_AS(weighting_from_string("area"), ValidationError);
}

TEST_CASE("relaxed recall") {
    const auto& vocab = CategoryVocabulary::builtin();
    auto dog = make({{"dog", 0.8}});
    auto cat = make({{"cat", 0.6}}, Role::RECON);
    auto car = make({{"car", 0.9}}, Role::RECON);
    CHECK(strict_recall(dog, cat, 0.3, vocab.salient()).value() == 0.0);
    CHECK(relaxed_recall(dog, cat, 0.3, vocab).value() == 1.0);
    CHECK(relaxed_recall(dog, dog, 0.3, vocab).value() == 1.0);
    CHECK(relaxed_recall(dog, car, 0.3, vocab).value() == 0.0);
    // No qualifying GT category (below threshold, or not salient).
    CHECK_FALSE(relaxed_recall(make({{"dog", 0.1}}), cat, 0.3, vocab).has_value());
    CHECK_FALSE(relaxed_recall(make({{"cup", 0.9}}), cat, 0.3, vocab).has_value());
    CHECK(relaxed_recall(make({{"cup", 0.9}}), make({{"bowl", 0.9}}), 0.3, vocab,
                         std::set<std::string>{"cup"}).value() == 1.0);
}

TEST_CASE("relaxed recall never falls below strict recall") {
    const auto& vocab = CategoryVocabulary::builtin();
    std::mt19937_64 rng(3);
    std::vector<std::string> cats(vocab.salient().begin(), vocab.salient().end());
    for (int i = 0; i < 300; ++i) {
        auto gt = random_set(rng, cats, false);
        auto rc = random_set(rng, cats, false);
        auto strict = strict_recall(gt, rc, 0.3, vocab.salient());
        auto relaxed = relaxed_recall(gt, rc, 0.3, vocab);
        REQUIRE(strict.has_value() == relaxed.has_value());
        if (strict) CHECK(*relaxed >= *strict);
    }
}
