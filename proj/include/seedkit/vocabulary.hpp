#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace seedkit {

/// Detector category vocabulary: 80 COCO categories plus "man" and "woman",
/// split into 30 salient and 52 inconspicuous categories, each mapped to a
/// supercategory (COCO 2017 supercategories; man/woman -> person).
class CategoryVocabulary {
public:
    /// The shipped default vocabulary.
    static const CategoryVocabulary& builtin();
    /// Parses a vocabulary JSON document ({"salient": [...], "inconspicuous":
    /// [...], "supercategories": {category: supercategory}}) and validates it.
    static CategoryVocabulary from_json(const std::string& text);
    static CategoryVocabulary load(const std::string& path);

    CategoryVocabulary(std::vector<std::string> salient, std::vector<std::string> inconspicuous,
                       std::map<std::string, std::string> supercategory);

    const std::vector<std::string>& categories() const { return categories_; }
    const std::set<std::string>& salient() const { return salient_; }
    const std::set<std::string>& inconspicuous() const { return inconspicuous_; }
    bool contains(const std::string& c) const { return supercategory_.count(c) != 0; }
    bool is_salient(const std::string& c) const { return salient_.count(c) != 0; }
    /// Throws ValidationError for unknown categories.
    const std::string& supercategory(const std::string& c) const;

    std::string to_json() const;

    bool operator==(const CategoryVocabulary&) const = default;

private:
    std::vector<std::string> categories_;
    std::set<std::string> salient_;
    std::set<std::string> inconspicuous_;
    std::map<std::string, std::string> supercategory_;
};

}  // namespace seedkit
