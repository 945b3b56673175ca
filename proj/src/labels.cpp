#include "privlens/labels.hpp"

#include <algorithm>
#include <json.hpp>

#include "privlens/corpus.hpp"
#include "privlens/error.hpp"
#include "privlens/tokenize.hpp"

namespace privlens {

using nlohmann::ordered_json;

std::string Label::display() const {
  return level == LabelLevel::category ? name : name + "=" + value;
}

std::string Label::key() const {
  return (level == LabelLevel::category ? "c:" : "a:") + to_lower(display());
}

LabelSchema::LabelSchema(std::vector<std::string> categories, std::vector<AttributeSpec> attributes)
    : categories_(std::move(categories)), attributes_(std::move(attributes)) {
  build_index();
}

void LabelSchema::build_index() {
  index_.clear();
  order_.clear();
  auto add = [&](Label l) {
    if (!index_.emplace(l.key(), order_.size()).second)
      throw SchemaError("duplicate label in schema: " + l.display());
    order_.push_back(std::move(l));
  };
  for (const auto& c : categories_) add(Label::category(c));
  std::set<std::string> names;
  for (const auto& a : attributes_) {
    if (!names.insert(to_lower(a.name)).second) throw SchemaError("duplicate attribute " + a.name);
    if (a.values.empty()) throw SchemaError("attribute " + a.name + " has no values");
    if (a.categories.empty()) throw SchemaError("attribute " + a.name + " is bound to no category");
    for (const auto& c : a.categories)
      if (!index_.count(Label::category(c).key()))
        throw SchemaError("attribute " + a.name + " bound to unknown category " + c);
    for (const auto& v : a.values) add(Label::attribute(a.name, v));
  }
}

const AttributeSpec* LabelSchema::attribute(std::string_view name) const {
  std::string k = to_lower(name);
  for (const auto& a : attributes_)
    if (to_lower(a.name) == k) return &a;
  return nullptr;
}

void LabelSchema::set_excluded(LabelSet labels) {
  LabelSet canon;
  for (const auto& l : labels) {
    auto c = canonical(l);
    if (!c) throw SchemaError("excluded label not in schema: " + l.display());
    canon.insert(*c);
  }
  excluded_ = std::move(canon);
}

void LabelSchema::add_alias(std::string from, std::string to) {
  aliases_[to_lower(from)] = std::move(to);
}

std::optional<Label> LabelSchema::canonical(const Label& label) const {
  auto resolve = [&](const std::string& s) {
    auto it = aliases_.find(to_lower(s));
    return it == aliases_.end() ? s : it->second;
  };
  Label l{label.level, resolve(collapse_whitespace(label.name)),
          label.level == LabelLevel::category ? std::string() : resolve(collapse_whitespace(label.value))};
  auto it = index_.find(l.key());
  if (it == index_.end()) return std::nullopt;
  return order_[it->second];
}

std::optional<std::size_t> LabelSchema::position(const Label& label) const {
  auto c = canonical(label);
  if (!c) return std::nullopt;
  return index_.at(c->key());
}

std::vector<Label> LabelSchema::category_labels() const {
  return {order_.begin(), order_.begin() + static_cast<long>(categories_.size())};
}

std::vector<Label> LabelSchema::attribute_labels(std::string_view attribute) const {
  std::vector<Label> out;
  if (const auto* a = this->attribute(attribute))
    for (const auto& v : a->values) out.push_back(Label::attribute(a->name, v));
  return out;
}

std::vector<std::string> LabelSchema::attributes_of(std::string_view category) const {
  std::vector<std::string> out;
  std::string k = to_lower(category);
  for (const auto& a : attributes_)
    for (const auto& c : a.categories)
      if (to_lower(c) == k) {
        out.push_back(a.name);
        break;
      }
  return out;
}

void LabelSchema::save(const std::filesystem::path& path) const {
  ordered_json j;
  j["categories"] = categories_;
  j["attributes"] = ordered_json::array();
  for (const auto& a : attributes_)
    j["attributes"].push_back({{"name", a.name}, {"values", a.values}, {"categories", a.categories}});
  j["excluded"] = ordered_json::array();
  for (const auto& l : excluded_) {
    if (l.level == LabelLevel::category) j["excluded"].push_back({{"category", l.name}});
    else j["excluded"].push_back({{"attribute", l.name}, {"value", l.value}});
  }
  j["aliases"] = ordered_json::object();
  for (const auto& [from, to] : aliases_) j["aliases"][from] = to;
  write_file_atomic(path, j.dump(2) + "\n");
}

LabelSchema LabelSchema::load(const std::filesystem::path& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const StorageError& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  try {
    std::vector<AttributeSpec> attrs;
    for (const auto& a : j.at("attributes"))
      attrs.push_back({a.at("name").get<std::string>(), a.at("values").get<std::vector<std::string>>(),
                       a.at("categories").get<std::vector<std::string>>()});
    LabelSchema s(j.at("categories").get<std::vector<std::string>>(), std::move(attrs));
    if (j.contains("aliases"))
      for (const auto& [from, to] : j["aliases"].items()) s.add_alias(from, to.get<std::string>());
    LabelSet ex;
    if (j.contains("excluded"))
      for (const auto& e : j["excluded"]) {
        if (e.contains("category")) ex.insert(Label::category(e["category"].get<std::string>()));
        else ex.insert(Label::attribute(e.at("attribute").get<std::string>(), e.at("value").get<std::string>()));
      }
    s.set_excluded(std::move(ex));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

LabelSchema LabelSchema::opp115() {
  const std::string fp = "First Party Collection/Use", tp = "Third Party Sharing/Collection",
                    choice = "User Choice & Control", access = "User Access, Edit & Deletion",
                    retention = "Data Retention", security = "Data Security",
                    change = "Policy Change", dnt = "Do Not Track",
                    audiences = "International/Specific Audiences";
  std::vector<std::string> categories = {fp, tp, access, retention, security, audiences, dnt,
                                         change, choice, "Introductory/Generic",
                                         "Practice Not Covered", "Privacy Contact Information"};
  std::vector<AttributeSpec> a = {
      {"Access Scope", {"Profile data", "Unspecified", "User account data"}, {access}},
      {"Access Type", {"Edit information", "Unspecified", "View"}, {access}},
      {"Action First-Party",
       {"Collect in mobile app", "Collect on mobile website", "Collect on website", "Unspecified"},
       {fp}},
      {"Action Third Party",
       {"Collect on first party website/app", "Receive/Shared with", "See",
        "Track on first party website/app", "Unspecified"},
       {tp}},
      {"Audience Type", {"Californians", "Children", "Europeans"}, {audiences}},
      {"Change Type", {"Privacy relevant change", "Unspecified"}, {change}},
      {"Choice Scope",
       {"Both", "Collection", "First party collection", "First party use",
        "Third party sharing/collection", "Third party use", "Unspecified", "Use"},
       {fp, tp, choice}},
      {"Choice Type",
       {"Browser/device privacy controls", "Dont use service/feature",
        "First-party privacy controls", "Opt-in", "Opt-out link", "Opt-out via contacting company",
        "Third-party privacy controls", "Unspecified"},
       {fp, tp, choice}},
      {"Collection Mode", {"Explicit", "Implicit", "Unspecified"}, {fp}},
      {"Do Not Track policy", {"Honored", "Not honored"}, {dnt}},
      {"Does/Does Not", {"Does", "Does Not"}, {fp, tp}},
      {"Identifiability", {"Aggregated or anonymized", "Identifiable", "Unspecified"}, {fp, tp}},
      {"Notification Type",
       {"General notice in privacy policy", "General notice on website", "Personal notice",
        "Unspecified"},
       {change}},
      {"Personal Information Type",
       {"Computer information", "Contact", "Cookies and tracking elements", "Demographic",
        "Financial", "Generic personal information", "Health", "IP address and device IDs",
        "Location", "Personal identifier", "Social media data", "Survey data", "Unspecified",
        "User online activities"},
       {fp, tp, choice, retention}},
      {"Purpose",
       {"Additional service/feature", "Advertising", "Analytics/Research",
        "Basic service/feature", "Legal requirement", "Marketing", "Merger/Acquisition",
        "Personalization/Customization", "Service operation and security", "Unspecified"},
       {fp, tp, choice}},
      {"Retention Period", {"Indefinitely", "Limited", "Unspecified"}, {retention}},
      {"Retention Purpose",
       {"Legal requirement", "Perform service", "Service operation and security", "Unspecified"},
       {retention}},
      {"Security Measure",
       {"Data access limitation", "Generic", "Privacy review/audit", "Privacy/Security program",
        "Secure data storage", "Secure data transfer", "Secure user authentication"},
       {security}},
      {"Third Party Entity",
       {"Named third party", "Other part of company/affiliate", "Public", "Unnamed third party",
        "Unspecified"},
       {tp}},
      {"User Choice", {"None", "Opt-in", "Unspecified"}, {change}},
      {"User Type", {"Unspecified", "User with account"}, {fp, tp, choice, access}},
  };
  LabelSchema s(std::move(categories), std::move(a));
  // Spellings used in the annotation distribution.
  s.add_alias("User Choice/Control", choice);
  s.add_alias("User Access, Edit and Deletion", access);
  s.add_alias("International and Specific Audiences", audiences);
  s.add_alias("Don't use service/feature", "Dont use service/feature");
  s.add_alias("Personalization/ Customization", "Personalization/Customization");
  s.add_alias("Practice not covered", "Practice Not Covered");
  s.add_alias("Privacy contact information", "Privacy Contact Information");
  s.set_excluded({
      Label::category(retention),
      Label::category("Practice Not Covered"),
      Label::attribute("Access Scope", "Unspecified"),
      Label::attribute("Action Third Party", "Collect on first party website/app"),
      Label::attribute("Choice Scope", "Third party use"),
      Label::attribute("Choice Scope", "Unspecified"),
      Label::attribute("Choice Type", "Third-party privacy controls"),
      Label::attribute("Collection Mode", "Unspecified"),
      Label::attribute("Purpose", "Unspecified"),
      Label::attribute("Retention Period", "Limited"),
  });
  return s;
}

LabelSet consolidate(const AnnotatedSegment& seg, int min_agree, const LabelSchema* schema) {
  if (min_agree < 1) throw DomainError("consolidate: min_agree must be >= 1");
  std::map<std::string, std::pair<Label, int>> votes;
  for (const auto& [annotator, labels] : seg.annotator_labels) {
    std::set<std::string> seen;  // one vote per annotator per label
    for (const auto& l : labels) {
      Label c = l;
      if (schema)
        if (auto canon = schema->canonical(l)) c = *canon;
      std::string k = c.key();
      if (!seen.insert(k).second) continue;
      auto it = votes.find(k);
      if (it == votes.end()) votes.emplace(k, std::pair{c, 1});
      else ++it->second.second;
    }
  }
  LabelSet out;
  for (const auto& [k, lv] : votes)
    if (lv.second >= min_agree) out.insert(lv.first);
  return out;
}

std::vector<std::uint8_t> encode_multilabel(const LabelSet& labels, const LabelSchema& schema) {
  std::vector<std::uint8_t> v(schema.size(), 0);
  for (const auto& l : labels) {
    auto p = schema.position(l);
    if (!p) throw SchemaError("label not in schema: " + l.display());
    v[*p] = 1;
  }
  return v;
}

LabelSet decode_multilabel(const std::vector<std::uint8_t>& vec, const LabelSchema& schema) {
  if (vec.size() != schema.size())
    throw SchemaError("label vector has " + std::to_string(vec.size()) + " entries, schema has " +
                      std::to_string(schema.size()));
  LabelSet out;
  for (std::size_t i = 0; i < vec.size(); ++i)
    if (vec[i]) out.insert(schema.labels()[i]);
  return out;
}

}  // namespace privlens
