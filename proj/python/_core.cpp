#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "seedkit/meta_eval.hpp"
#include "seedkit/object_metrics.hpp"
#include "seedkit/rank_stats.hpp"
#include "seedkit/report.hpp"
#include "seedkit/vector_metrics.hpp"
#include "seedkit/io.hpp"

namespace py = pybind11;
using namespace seedkit;

namespace {

// Accepts {category: confidence} or a list of (category, confidence[, bbox]).
DetectionSet to_detections(const py::handle& obj, Role role) {
    DetectionSet s;
    s.role = role;
    if (py::isinstance<py::dict>(obj)) {
        for (auto [k, v] : py::reinterpret_borrow<py::dict>(obj))
            s.detections.push_back({k.cast<std::string>(), v.cast<double>(), std::nullopt});
    } else {
        for (auto item : obj) {
            auto t = py::reinterpret_borrow<py::sequence>(item);
            Detection d{t[0].cast<std::string>(), t[1].cast<double>(), std::nullopt};
            if (t.size() > 2 && !t[2].is_none()) {
                auto b = t[2].cast<std::vector<double>>();
                if (b.size() != 4) throw ValidationError("bbox must be [x, y, w, h]");
                d.bbox = BBox{b[0], b[1], b[2], b[3]};
            }
            s.detections.push_back(std::move(d));
        }
    }
    for (const auto& d : s.detections)
        if (!(d.confidence >= 0 && d.confidence <= 1))
            throw ValidationError("confidence of '" + d.category + "' outside [0, 1]");
    s.canonicalize();
    return s;
}

ImagePixels to_image(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 3 || a.shape(2) != 3) throw ValidationError("expected an H x W x 3 uint8 array");
    ImagePixels img;
    img.height = static_cast<int>(a.shape(0));
    img.width = static_cast<int>(a.shape(1));
    img.data.assign(a.data(), a.data() + a.size());
    return img;
}

py::dict ci_dict(const BootstrapCI& ci) {
    py::dict d;
    d["delta"] = ci.metric_delta_name;
    d["point"] = ci.point;
    d["lower"] = ci.lower;
    d["upper"] = ci.upper;
    d["level"] = ci.level;
    d["iterations"] = ci.iterations;
    d["seed"] = ci.seed;
    d["redraws"] = ci.redraws;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Reconstruction-evaluation metrics and meta-evaluation statistics.";

    auto base = py::register_exception<Error>(m, "SeedkitError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<UndefinedError>(m, "UndefinedError", base.ptr());

    m.def("version", &version);

    m.def(
        "object_recall_precision",
        [](const py::object& gt, const py::object& recon, double step, const std::string& weighting) {
            auto s = object_recall_precision(to_detections(gt, Role::GT), to_detections(recon, Role::RECON),
                                             ThresholdGrid{step}, weighting_from_string(weighting));
            py::dict d;
            d["recall"] = s.recall;
            d["precision"] = s.precision;
            d["f1"] = s.f1;
            d["recall_degenerate"] = s.recall_degenerate;
            d["precision_degenerate"] = s.precision_degenerate;
            return d;
        },
        py::arg("gt"), py::arg("recon"), py::arg("step") = 0.01, py::arg("weighting") = "none",
        "Object recall, precision and F1 averaged over the confidence threshold grid.");

    m.def(
        "relaxed_recall",
        [](const py::object& gt, const py::object& recon, double t) {
            return relaxed_recall(to_detections(gt, Role::GT), to_detections(recon, Role::RECON), t,
                                  CategoryVocabulary::builtin());
        },
        py::arg("gt"), py::arg("recon"), py::arg("threshold") = 0.3);

    m.def("cosine_similarity", [](std::vector<double> u, std::vector<double> v) { return cosine_similarity(u, v); });
    m.def("pearson", [](std::vector<double> u, std::vector<double> v) { return pearson(u, v); });
    m.def("correlation_distance", [](std::vector<double> u, std::vector<double> v) { return correlation_distance(u, v); });
    m.def("seed_score", &seed_score, py::arg("object_f1"), py::arg("cap_sim"), py::arg("effnet_bar"));
    m.def("ssim", [](const py::array_t<std::uint8_t>& a, const py::array_t<std::uint8_t>& b) {
        return ssim(to_image(a), to_image(b));
    });
    m.def("pixcorr", [](const py::array_t<std::uint8_t>& a, const py::array_t<std::uint8_t>& b) {
        return pixcorr(to_image(a), to_image(b));
    });
    m.def(
        "two_way_identification",
        [](const std::vector<std::vector<double>>& gt, const std::vector<std::vector<double>>& recon) {
            auto r = two_way_identification(gt, recon);
            return py::make_tuple(r.overall, r.per_image);
        },
        "Returns (overall, per_image) win rates.");

    m.def("kendall_tau_b", [](std::vector<double> x, std::vector<double> y) { return kendall_tau_b(x, y); });
    m.def("pairwise_accuracy", [](std::vector<double> metric, std::vector<double> human) {
        return pairwise_accuracy(metric, human);
    });

    m.def(
        "icc_2k",
        [](const std::vector<std::vector<double>>& items_by_raters) {
            auto r = icc_2k(items_by_raters);
            py::dict d;
            d["icc"] = r.icc;
            d["f_statistic"] = r.f_statistic;
            d["df1"] = r.df1;
            d["df2"] = r.df2;
            d["p_value"] = r.p_value;
            d["no_item_variance"] = r.no_item_variance;
            return d;
        },
        py::arg("items_by_raters"));

    py::class_<RatingsMatrix>(m, "Ratings")
        .def_readonly("evaluator_ids", &RatingsMatrix::evaluator_ids)
        .def_readonly("image_ids", &RatingsMatrix::image_ids)
        .def_property_readonly("complete", [](const RatingsMatrix& r) { return r.complete(); })
        .def("__repr__", [](const RatingsMatrix& r) {
            return "<Ratings " + std::to_string(r.n_evaluators()) + " evaluators x " + std::to_string(r.n_items()) +
                   " items>";
        });
    m.def("parse_ratings", &parse_ratings, py::arg("text"));
    m.def("load_ratings", &load_ratings, py::arg("path"));
    m.def("human_scores", [](const RatingsMatrix& r, bool raw) {
        return raw ? raw_human_scores(r) : normalize_ratings(r).human_score;
    }, py::arg("ratings"), py::arg("raw") = false);

    m.def(
        "bootstrap_delta",
        [](const RatingsMatrix& ratings, const ScoreMap& a, const ScoreMap& b, const std::string& stat,
           int iterations, double level, std::uint64_t seed, unsigned threads) {
            BootstrapOptions o;
            o.stat = alignment_stat_from_string(stat);
            o.iterations = iterations;
            o.level = level;
            o.seed = seed;
            o.threads = threads;
            py::gil_scoped_release release;
            auto ci = bootstrap_delta(ratings, a, b, o);
            py::gil_scoped_acquire acquire;
            return ci_dict(ci);
        },
        py::arg("ratings"), py::arg("metric_a"), py::arg("metric_b"), py::arg("stat") = "tau_b",
        py::arg("iterations") = 1000, py::arg("level") = 0.95, py::arg("seed") = 0, py::arg("threads") = 1,
        "Percentile CI of stat(metric_a) - stat(metric_b) under evaluator resampling.");

    m.def(
        "run",
        [](const std::string& subcommand, const std::string& config_json) {
            RunConfig cfg;
            cfg.subcommand = subcommand;
            cfg.merge_json(config_json, {});
            auto out = run_command(cfg);
            return py::make_tuple(out.files, out.summary);
        },
        py::arg("subcommand"), py::arg("config_json") = "{}",
        "Runs a CLI subcommand in-process; returns ({file name: contents}, summary).");
}
