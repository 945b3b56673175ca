#pragma once

#include <random>
#include <string>
#include <vector>

#include "privlens/content_classifier.hpp"

namespace fixtures {

// Five categories with disjoint vocabularies; each category has one
// two-valued attribute whose values also have their own words.
inline privlens::LabelSchema separable_schema() {
  std::vector<std::string> cats;
  std::vector<privlens::AttributeSpec> attrs;
  for (int c = 0; c < 5; ++c) {
    cats.push_back("Category " + std::string(1, static_cast<char>('A' + c)));
    attrs.push_back({"Attribute " + std::string(1, static_cast<char>('A' + c)),
                     {"first", "second"},
                     {cats.back()}});
  }
  return privlens::LabelSchema(cats, attrs);
}

inline std::vector<privlens::LabeledSegment> separable_corpus(std::size_t n, unsigned seed) {
  auto schema = separable_schema();
  std::mt19937 rng(seed);
  std::vector<privlens::LabeledSegment> out;
  for (std::size_t i = 0; i < n; ++i) {
    privlens::LabeledSegment s;
    s.id = "seg" + std::to_string(i);
    s.policy_id = "policy" + std::to_string(i / 10);
    int first = static_cast<int>(rng() % 5);
    std::vector<int> cats = {first};
    if (rng() % 4 == 0) cats.push_back((first + 1 + static_cast<int>(rng() % 4)) % 5);
    for (int c : cats) {
      const auto& attr = schema.attributes()[c];
      int v = static_cast<int>(rng() % 2);
      s.labels.insert(privlens::Label::category(schema.categories()[c]));
      s.labels.insert(privlens::Label::attribute(attr.name, attr.values[v]));
      for (int k = 0; k < 8; ++k) s.text += "cat" + std::to_string(c) + "word" + std::to_string(rng() % 20) + " ";
      for (int k = 0; k < 4; ++k)
        s.text += "attr" + std::to_string(c) + "val" + std::to_string(v) + "word" +
                  std::to_string(rng() % 10) + " ";
    }
    // Shared filler carries no signal.
    for (int k = 0; k < 6; ++k) s.text += std::string(k % 2 ? "the " : "data ");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace fixtures
