#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace privlens {

enum class LabelLevel { category, attribute };

// A top-level category (value empty) or an attribute-value pair.
struct Label {
  LabelLevel level = LabelLevel::category;
  std::string name;
  std::string value;

  auto operator<=>(const Label&) const = default;

  static Label category(std::string name) { return {LabelLevel::category, std::move(name), {}}; }
  static Label attribute(std::string name, std::string value) {
    return {LabelLevel::attribute, std::move(name), std::move(value)};
  }
  // "Category" or "Attribute=Value".
  std::string display() const;
  // Lowercased display form; labels equal under it are the same label.
  std::string key() const;
};

using LabelSet = std::set<Label>;

struct AttributeSpec {
  std::string name;
  std::vector<std::string> values;
  std::vector<std::string> categories;  // categories the attribute refines
};

class LabelSchema {
 public:
  LabelSchema() = default;
  // Throws SchemaError on duplicates or unbound attributes.
  LabelSchema(std::vector<std::string> categories, std::vector<AttributeSpec> attributes);

  const std::vector<std::string>& categories() const { return categories_; }
  const std::vector<AttributeSpec>& attributes() const { return attributes_; }
  const AttributeSpec* attribute(std::string_view name) const;

  // Labels dropped from analyses (low held-out precision). Configurable.
  const LabelSet& excluded() const { return excluded_; }
  void set_excluded(LabelSet labels);

  // Canonical spelling of a label, matching case-insensitively and through
  // the alias table; nullopt if the label is not in the schema.
  std::optional<Label> canonical(const Label& label) const;
  void add_alias(std::string from, std::string to);  // names or values

  // Positions: categories first, then each attribute's values in order.
  std::size_t size() const { return index_.size(); }
  const std::vector<Label>& labels() const { return order_; }
  std::optional<std::size_t> position(const Label& label) const;

  std::vector<Label> category_labels() const;
  std::vector<Label> attribute_labels(std::string_view attribute) const;
  // Attributes bound to the category.
  std::vector<std::string> attributes_of(std::string_view category) const;

  void save(const std::filesystem::path& path) const;
  static LabelSchema load(const std::filesystem::path& path);

  // 12 categories and 21 attributes with the value sets used for the
  // attribute classifiers, bindings as in the annotation scheme, and the
  // low-precision exclusions.
  static LabelSchema opp115();

 private:
  void build_index();

  std::vector<std::string> categories_;
  std::vector<AttributeSpec> attributes_;
  LabelSet excluded_;
  std::map<std::string, std::string> aliases_;  // lowercase -> canonical
  std::map<std::string, std::size_t> index_;    // Label::key() -> position
  std::vector<Label> order_;
};

// annotator id -> labels
struct AnnotatedSegment {
  std::string id;
  std::string policy_id;
  std::string text;
  std::map<std::string, LabelSet> annotator_labels;
};

// Labels given by at least min_agree annotators, comparing spellings
// case-insensitively. The spelling returned is the schema's if a schema is
// given, otherwise the first one seen (annotators in id order).
LabelSet consolidate(const AnnotatedSegment& seg, int min_agree = 2,
                     const LabelSchema* schema = nullptr);

// Throws SchemaError on labels outside the schema.
std::vector<std::uint8_t> encode_multilabel(const LabelSet& labels, const LabelSchema& schema);
LabelSet decode_multilabel(const std::vector<std::uint8_t>& vec, const LabelSchema& schema);

}  // namespace privlens
