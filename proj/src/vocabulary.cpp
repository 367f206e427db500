#include "seedkit/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "seedkit/types.hpp"

namespace seedkit {

namespace {

constexpr std::size_t kCategoryCount = 82;
constexpr std::size_t kSalientCount = 30;

const std::vector<std::string> kSalient = {
    "person", "man",     "woman", "bird",       "cat",    "dog",     "horse",        "sheep",
    "cow",    "elephant", "bear", "zebra",      "giraffe", "bicycle", "car",         "motorcycle",
    "airplane", "bus",   "train", "truck",      "boat",   "bench",   "chair",        "couch",
    "bed",    "dining table", "toilet", "sink", "refrigerator", "clock"};

const std::vector<std::string> kInconspicuous = {
    "traffic light", "fire hydrant", "stop sign",  "parking meter", "backpack",    "umbrella",
    "handbag",       "tie",          "suitcase",   "frisbee",       "skis",        "snowboard",
    "sports ball",   "kite",         "baseball bat", "baseball glove", "skateboard", "surfboard",
    "tennis racket", "bottle",       "wine glass", "cup",           "fork",        "knife",
    "spoon",         "bowl",         "banana",     "apple",         "sandwich",    "orange",
    "broccoli",      "carrot",       "hot dog",    "pizza",         "donut",       "cake",
    "potted plant",  "tv",           "laptop",     "mouse",         "remote",      "keyboard",
    "cell phone",    "microwave",    "oven",       "toaster",       "book",        "vase",
    "scissors",      "teddy bear",   "hair drier", "toothbrush"};

// COCO 2017 supercategories.
const std::vector<std::pair<std::string, std::vector<std::string>>> kSupercategories = {
    {"person", {"person", "man", "woman"}},
    {"vehicle", {"bicycle", "car", "motorcycle", "airplane", "bus", "train", "truck", "boat"}},
    {"outdoor", {"traffic light", "fire hydrant", "stop sign", "parking meter", "bench"}},
    {"animal",
     {"bird", "cat", "dog", "horse", "sheep", "cow", "elephant", "bear", "zebra", "giraffe"}},
    {"accessory", {"backpack", "umbrella", "handbag", "tie", "suitcase"}},
    {"sports",
     {"frisbee", "skis", "snowboard", "sports ball", "kite", "baseball bat", "baseball glove",
      "skateboard", "surfboard", "tennis racket"}},
    {"kitchen", {"bottle", "wine glass", "cup", "fork", "knife", "spoon", "bowl"}},
    {"food",
     {"banana", "apple", "sandwich", "orange", "broccoli", "carrot", "hot dog", "pizza", "donut",
      "cake"}},
    {"furniture", {"chair", "couch", "potted plant", "bed", "dining table", "toilet"}},
    {"electronic", {"tv", "laptop", "mouse", "remote", "keyboard", "cell phone"}},
    {"appliance", {"microwave", "oven", "toaster", "sink", "refrigerator"}},
    {"indoor", {"book", "clock", "vase", "scissors", "teddy bear", "hair drier", "toothbrush"}},
};

}  // namespace

CategoryVocabulary::CategoryVocabulary(std::vector<std::string> salient,
                                       std::vector<std::string> inconspicuous,
                                       std::map<std::string, std::string> supercategory)
    : supercategory_(std::move(supercategory)) {
    for (auto& c : salient) {
        if (c.empty()) throw ValidationError("vocabulary: empty category name");
        if (!salient_.insert(c).second)
            throw ValidationError("vocabulary: duplicate salient category '" + c + "'");
        categories_.push_back(c);
    }
    for (auto& c : inconspicuous) {
        if (c.empty()) throw ValidationError("vocabulary: empty category name");
        if (salient_.count(c))
            throw ValidationError("vocabulary: '" + c + "' is both salient and inconspicuous");
        if (!inconspicuous_.insert(c).second)
            throw ValidationError("vocabulary: duplicate inconspicuous category '" + c + "'");
        categories_.push_back(c);
    }
    if (categories_.size() != kCategoryCount || salient_.size() != kSalientCount)
        throw ValidationError("vocabulary: expected " + std::to_string(kSalientCount) +
                              " salient + " + std::to_string(kCategoryCount - kSalientCount) +
                              " inconspicuous categories, got " + std::to_string(salient_.size()) +
                              " + " + std::to_string(inconspicuous_.size()));
    for (const auto& c : categories_) {
        auto it = supercategory_.find(c);
        if (it == supercategory_.end() || it->second.empty())
            throw ValidationError("vocabulary: category '" + c + "' has no supercategory");
    }
    if (supercategory_.size() != categories_.size())
        throw ValidationError("vocabulary: supercategory map lists categories outside the vocabulary");
}

const CategoryVocabulary& CategoryVocabulary::builtin() {
    static const CategoryVocabulary vocab = [] {
        std::map<std::string, std::string> super;
        for (const auto& [sc, members] : kSupercategories)
            for (const auto& m : members) super[m] = sc;
        return CategoryVocabulary(kSalient, kInconspicuous, std::move(super));
    }();
    return vocab;
}

CategoryVocabulary CategoryVocabulary::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("vocabulary: ") + e.what());
    }
    try {
        return CategoryVocabulary(j.at("salient").get<std::vector<std::string>>(),
                                  j.at("inconspicuous").get<std::vector<std::string>>(),
                                  j.at("supercategories").get<std::map<std::string, std::string>>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("vocabulary: ") + e.what());
    }
}

CategoryVocabulary CategoryVocabulary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open vocabulary file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

const std::string& CategoryVocabulary::supercategory(const std::string& c) const {
    auto it = supercategory_.find(c);
    if (it == supercategory_.end()) throw ValidationError("unknown category '" + c + "'");
    return it->second;
}

std::string CategoryVocabulary::to_json() const {
    nlohmann::ordered_json j;
    std::vector<std::string> sal, inc;
    for (const auto& c : categories_) (salient_.count(c) ? sal : inc).push_back(c);
    j["salient"] = sal;
    j["inconspicuous"] = inc;
    nlohmann::ordered_json sc = nlohmann::ordered_json::object();
    for (const auto& c : categories_) sc[c] = supercategory_.at(c);
    j["supercategories"] = sc;
    return j.dump(2) + "\n";
}

}  // namespace seedkit
