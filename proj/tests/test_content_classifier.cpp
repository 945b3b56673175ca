#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "privlens/content_classifier.hpp"
#include "privlens/error.hpp"

using namespace privlens;
namespace fs = std::filesystem;

namespace {

Label cat(const std::string& n) { return Label::category(n); }

AnnotatedSegment annotated(std::map<std::string, LabelSet> by_annotator) {
  AnnotatedSegment s;
  s.id = "s";
  s.annotator_labels = std::move(by_annotator);
  return s;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Predicts label l when the text contains "<l>"; a stand-in for an external
// backend to check that the bundle only depends on the interface.
class KeywordBackend : public ClassifierBackend {
 public:
  std::string kind() const override { return "keyword"; }
  void fit(const std::vector<std::string>&, const LabelMatrix& y) override { n_ = y[0].size(); }
  std::vector<double> predict_proba(std::string_view text) const override {
    std::vector<double> p(n_, 0.1);
    for (std::size_t l = 0; l < n_; ++l)
      if (text.find("<" + std::to_string(l) + ">") != std::string_view::npos) p[l] = 0.9;
    return p;
  }
  std::size_t label_count() const override { return n_; }
  void save(const fs::path&) const override {}

 private:
  std::size_t n_ = 0;
};

LabelMatrix predict_matrix(const ModelBundle& b, const std::vector<LabeledSegment>& segs,
                           const std::vector<Label>& space) {
  LabelMatrix out;
  for (const auto& s : segs) {
    auto labels = label_segment(s.text, b).labels();
    std::vector<std::uint8_t> row;
    for (const auto& l : space) row.push_back(labels.count(l) > 0);
    out.push_back(row);
  }
  return out;
}

std::vector<std::string> names_of(const std::vector<Label>& space) {
  std::vector<std::string> n;
  for (const auto& l : space) n.push_back(l.display());
  return n;
}

}  // namespace

TEST_CASE("shipped schema") {
  auto s = LabelSchema::opp115();
  CHECK(s.categories().size() == 12);
  CHECK(s.attributes().size() == 21);
  for (const auto& a : s.attributes()) CHECK_FALSE(a.categories.empty());
  std::size_t excluded_categories = 0, excluded_values = 0;
  for (const auto& l : s.excluded()) (l.level == LabelLevel::category ? excluded_categories : excluded_values)++;
  CHECK(excluded_categories == 2);
  CHECK(excluded_values == 8);
  CHECK(s.excluded().count(cat("Data Retention")));
  CHECK(s.excluded().count(cat("Practice Not Covered")));

  CHECK(s.canonical(cat("user choice/control")) == cat("User Choice & Control"));
  CHECK(s.canonical(Label::attribute("choice type", "don't use service/feature")) ==
        Label::attribute("Choice Type", "Dont use service/feature"));
  CHECK_FALSE(s.canonical(cat("Nonsense")).has_value());

  auto shipped = LabelSchema::load(fs::path(PRIVLENS_SHARE_DATA) / "schema" / "opp115.json");
  CHECK(shipped.labels() == s.labels());
  CHECK(shipped.excluded() == s.excluded());

  CHECK_THROWS_AS(LabelSchema({"A"}, {{"X", {"v"}, {"B"}}}), SchemaError);
  CHECK_THROWS_AS(LabelSchema({"A", "a"}, {}), SchemaError);
}

TEST_CASE("schema file round trip") {
  TempDir dir("privlens_schema_rt");
  auto s = LabelSchema::opp115();
  s.save(dir.path / "s.json");
  auto back = LabelSchema::load(dir.path / "s.json");
  CHECK(back.labels() == s.labels());
  CHECK(back.excluded() == s.excluded());
  CHECK(back.canonical(cat("User Choice/Control")) == cat("User Choice & Control"));
}

TEST_CASE("consolidation examples") {
  CHECK(consolidate(annotated({{"1", {cat("A")}}, {"2", {cat("A")}}, {"3", {cat("B")}}})) ==
        LabelSet{cat("A")});
  CHECK(consolidate(annotated({{"1", {cat("A")}}, {"2", {cat("B")}}, {"3", {cat("C")}}})).empty());
  CHECK(consolidate(annotated({{"1", {cat("A"), cat("B")}}, {"2", {cat("A"), cat("B")}}, {"3", {cat("A")}}})) ==
        LabelSet{cat("A"), cat("B")});
  auto mixed = consolidate(annotated({{"1", {Label::attribute("PIT", "User Profile")}},
                                      {"2", {Label::attribute("PIT", "User profile")}}}));
  REQUIRE(mixed.size() == 1);
  CHECK(mixed.begin()->value == "User Profile");
  CHECK(consolidate(annotated({{"1", {cat("A")}}}), 1) == LabelSet{cat("A")});
  CHECK_THROWS_AS(consolidate(annotated({}), 0), DomainError);
}

TEST_CASE("consolidation agrees with vote counting") {
  std::mt19937 rng(41);
  const char* pool[] = {"Alpha", "alpha", "ALPHA", "Beta", "beta", "Gamma", "Delta", "delta", "Eps"};
  for (int trial = 0; trial < 1000; ++trial) {
    int annotators = 1 + static_cast<int>(rng() % 4);
    int min_agree = 1 + static_cast<int>(rng() % 3);
    AnnotatedSegment seg;
    std::vector<std::vector<std::string>> raw;
    for (int a = 0; a < annotators; ++a) {
      std::vector<std::string> mine;
      int k = static_cast<int>(rng() % 5);
      for (int i = 0; i < k; ++i) {
        std::string l = pool[rng() % 9];
        mine.push_back(l);
        seg.annotator_labels[std::to_string(a)].insert(cat(l));
      }
      seg.annotator_labels[std::to_string(a)];
      raw.push_back(mine);
    }
    std::set<std::string> got;
    for (const auto& l : consolidate(seg, min_agree)) {
      std::string k = l.name;
      for (auto& c : k) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      got.insert(k);
    }
    CHECK(got == oracle::vote(raw, min_agree));

    // Monotone: one more annotator repeating annotator 0 never removes a label.
    AnnotatedSegment more = seg;
    more.annotator_labels["extra"] = seg.annotator_labels["0"];
    auto before = consolidate(seg, min_agree), after = consolidate(more, min_agree);
    for (const auto& l : before) {
      bool kept = std::any_of(after.begin(), after.end(), [&](const Label& x) { return x.key() == l.key(); });
      CHECK(kept);
    }
  }
}

TEST_CASE("multi-label encoding") {
  auto s = LabelSchema::opp115();
  auto zero = encode_multilabel({}, s);
  CHECK(zero.size() == s.size());
  CHECK(std::all_of(zero.begin(), zero.end(), [](auto v) { return v == 0; }));
  LabelSet all(s.labels().begin(), s.labels().end());
  auto ones = encode_multilabel(all, s);
  CHECK(std::all_of(ones.begin(), ones.end(), [](auto v) { return v == 1; }));
  CHECK(decode_multilabel(ones, s) == all);

  std::mt19937 rng(43);
  for (int trial = 0; trial < 500; ++trial) {
    LabelSet subset;
    for (const auto& l : s.labels())
      if (rng() % 5 == 0) subset.insert(l);
    CHECK(decode_multilabel(encode_multilabel(subset, s), s) == subset);
  }
  CHECK_THROWS_AS(encode_multilabel({cat("Unknown")}, s), SchemaError);
  CHECK_THROWS_AS(decode_multilabel({1, 0}, s), SchemaError);
}

TEST_CASE("stratified split examples") {
  LabelMatrix five(5, std::vector<std::uint8_t>{1});
  auto f = iterative_stratified_split(five, {3, 1, 1}, 7);
  std::vector<int> sizes(3);
  for (int x : f) ++sizes[x];
  CHECK(sizes == std::vector<int>{3, 1, 1});

  LabelMatrix ten;
  for (int i = 0; i < 10; ++i) ten.push_back({static_cast<std::uint8_t>(i % 2)});
  auto g = iterative_stratified_split(ten, {3, 1, 1}, 7);
  std::vector<int> with(3), total(3);
  for (int i = 0; i < 10; ++i) {
    ++total[g[i]];
    with[g[i]] += ten[i][0];
  }
  CHECK(total == std::vector<int>{6, 2, 2});
  for (int j = 0; j < 3; ++j) CHECK(std::abs(with[j] - total[j] * 0.5) <= 1.0);

  CHECK(iterative_stratified_split(ten, {3, 1, 1}, 99) == iterative_stratified_split(ten, {3, 1, 1}, 99));
  CHECK(iterative_stratified_split({}, {3, 1, 1}, 1).empty());
  CHECK_THROWS_AS(iterative_stratified_split(ten, {3, 0, 1}, 1), DomainError);
}

TEST_CASE("stratified split keeps label counts near ideal") {
  std::mt19937 rng(59);
  const std::vector<double> ratios = {3, 1, 1};
  for (int trial = 0; trial < 50; ++trial) {
    int n = 20 + static_cast<int>(rng() % 80), L = 1 + static_cast<int>(rng() % 4);
    LabelMatrix y(n, std::vector<std::uint8_t>(L));
    for (auto& row : y) row[rng() % L] = 1;  // one label per row
    auto folds = iterative_stratified_split(y, ratios, trial);
    REQUIRE(folds.size() == static_cast<std::size_t>(n));
    for (int l = 0; l < L; ++l) {
      std::vector<int> per(3);
      int total = 0;
      for (int i = 0; i < n; ++i)
        if (y[i][l]) {
          ++per[folds[i]];
          ++total;
        }
      for (int j = 0; j < 3; ++j) CHECK(std::abs(per[j] - oracle::ideal_count(total, ratios[j], 5)) <= 1.0);
    }
  }
}

TEST_CASE("stratified split over labeled segments") {
  auto segs = fixtures::separable_corpus(100, 3);
  auto schema = fixtures::separable_schema();
  auto a = stratified_split(segs, schema.category_labels(), 5);
  CHECK(a.subset.size() == 100);
  // Multi-label rows can overshoot a fold by one.
  CHECK(std::abs(static_cast<int>(a.count(Subset::train)) - 60) <= 1);
  CHECK(std::abs(static_cast<int>(a.count(Subset::validation)) - 20) <= 1);
  CHECK(std::abs(static_cast<int>(a.count(Subset::test)) - 20) <= 1);
}

TEST_CASE("hierarchy on a separable corpus") {
  auto schema = fixtures::separable_schema();
  auto train = fixtures::separable_corpus(200, 1);
  auto test = fixtures::separable_corpus(100, 2);
  auto bundle = train_hierarchy(train, schema, LinearBackend::factory());
  REQUIRE(bundle.trained());
  CHECK(bundle.attributes.size() == 5);
  CHECK(bundle.untrainable.empty());

  auto cats = schema.category_labels();
  auto train_eval = evaluate(label_matrix(train, cats), predict_matrix(bundle, train, cats), names_of(cats));
  CHECK(train_eval.micro_f1 == 1.0);
  auto test_eval = evaluate(label_matrix(test, cats), predict_matrix(bundle, test, cats), names_of(cats));
  CHECK(test_eval.micro_f1 >= 0.95);

  // A-vocabulary only: category A fires and only its attribute is evaluated.
  auto l = label_segment("cat0word1 cat0word2 cat0word3 attr0val1word2 attr0val1word4", bundle);
  CHECK(l.category_probs.at("Category A") > 0.5);
  for (const auto& [c, p] : l.category_probs)
    if (c != "Category A") CHECK(p <= 0.5);
  for (const auto& [av, p] : l.attribute_probs) CHECK(av.first == "Attribute A");
  CHECK(l.attribute_probs.at({"Attribute A", "second"}) > 0.5);

  auto none = label_segment("cat0word1 cat1word1", bundle, 1.0);
  CHECK(none.attribute_probs.empty());

  auto empty = label_segment("", bundle);
  for (const auto& [c, p] : empty.category_probs) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  for (const auto& [av, p] : empty.attribute_probs) {
    bool bound_active = false;
    for (const auto& [c, cp] : empty.category_probs)
      bound_active = bound_active || (cp > 0.5 && c.back() == av.first.back());
    CHECK(bound_active);
  }
}

TEST_CASE("attributes without label variety are untrainable") {
  auto schema = fixtures::separable_schema();
  auto train = fixtures::separable_corpus(60, 4);
  // Drop every segment of category E and force attribute D to one value.
  std::vector<LabeledSegment> kept;
  for (auto s : train) {
    if (s.labels.count(cat("Category E"))) continue;
    if (s.labels.count(Label::attribute("Attribute D", "second"))) {
      s.labels.erase(Label::attribute("Attribute D", "second"));
      s.labels.insert(Label::attribute("Attribute D", "first"));
    }
    kept.push_back(s);
  }
  auto b = train_hierarchy(kept, schema, LinearBackend::factory());
  CHECK(b.untrainable == std::set<std::string>{"Attribute D", "Attribute E"});
  CHECK(b.attributes.count("Attribute E") == 0);
  CHECK_THROWS_AS(train_hierarchy({}, schema, LinearBackend::factory()), DomainError);
  CHECK_THROWS_AS(label_segment("x", ModelBundle{}), DomainError);
}

TEST_CASE("bundle interface is backend independent") {
  auto schema = fixtures::separable_schema();
  auto train = fixtures::separable_corpus(40, 5);
  auto b = train_hierarchy(train, schema, [] { return std::make_unique<KeywordBackend>(); });
  auto l = label_segment("<2> <1>", b);
  CHECK(l.category_probs.at("Category C") == 0.9);
  CHECK(l.category_probs.at("Category A") == 0.1);
  CHECK(l.attribute_probs.count({"Attribute C", "second"}) == 1);
  CHECK(l.attribute_probs.count({"Attribute A", "first"}) == 0);
}

TEST_CASE("bundle save and load") {
  TempDir dir("privlens_bundle_rt");
  auto schema = fixtures::separable_schema();
  auto b = train_hierarchy(fixtures::separable_corpus(80, 6), schema, LinearBackend::factory());
  b.save(dir.path / "bundle");
  auto back = ModelBundle::load(dir.path / "bundle");
  for (const auto& s : fixtures::separable_corpus(20, 7)) {
    auto x = label_segment(s.text, b), y = label_segment(s.text, back);
    CHECK(x.category_probs == y.category_probs);
    CHECK(x.attribute_probs == y.attribute_probs);
  }
  CHECK_THROWS_AS(ModelBundle::load(dir.path / "missing"), ConfigError);
}

TEST_CASE("evaluation matches confusion-matrix oracle") {
  std::mt19937 rng(47);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 1 + static_cast<int>(rng() % 12), L = 1 + static_cast<int>(rng() % 6);
    LabelMatrix t(n, std::vector<std::uint8_t>(L)), p(n, std::vector<std::uint8_t>(L));
    std::vector<std::vector<int>> ti(n, std::vector<int>(L)), pi(n, std::vector<int>(L));
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < L; ++l) {
        ti[i][l] = t[i][l] = rng() % 2;
        pi[i][l] = p[i][l] = rng() % 3 == 0;
      }
    std::vector<std::string> names(L);
    for (int l = 0; l < L; ++l) names[l] = "L" + std::to_string(l);
    auto e = evaluate(t, p, names);
    auto o = oracle::confusion_scores(ti, pi);
    for (int l = 0; l < L; ++l) {
      CHECK(std::abs(e.per_label[l].precision - o.precision[l]) <= 1e-12);
      CHECK(std::abs(e.per_label[l].recall - o.recall[l]) <= 1e-12);
      CHECK(std::abs(e.per_label[l].f1 - o.f1[l]) <= 1e-12);
    }
    CHECK(std::abs(e.micro_precision - o.micro_p) <= 1e-12);
    CHECK(std::abs(e.micro_recall - o.micro_r) <= 1e-12);
    CHECK(std::abs(e.micro_f1 - o.micro_f1) <= 1e-12);
    CHECK(std::abs(e.macro_precision - o.macro_p) <= 1e-12);
    CHECK(std::abs(e.macro_recall - o.macro_r) <= 1e-12);
    CHECK(std::abs(e.macro_f1 - o.macro_f1) <= 1e-12);
  }
}

TEST_CASE("precision filter") {
  Evaluation e;
  LabelScore keep{"keep", 8, 2, 0, 8, 0.8, 1.0, 0.0, true};
  LabelScore drop{"drop", 6, 4, 0, 6, 0.6, 1.0, 0.0, true};
  LabelScore none{"none", 0, 0, 3, 3, 0.0, 0.0, 0.0, false};
  e.per_label = {keep, drop, none};
  auto f = precision_filter(e);
  CHECK(f.excluded == std::set<std::string>{"drop", "none"});
  CHECK(f.undefined == std::set<std::string>{"none"});
}

TEST_CASE("label dedup") {
  SegmentLabels a, b, c;
  a.category_probs = {{"X", 0.9}, {"Y", 0.2}};
  b.category_probs = {{"X", 0.8}, {"Y", 0.1}};
  c.category_probs = {{"X", 0.8}};
  c.attribute_probs = {{{"P", "q"}, 0.7}};
  CHECK(dedup_labels({a, b}).size() == 1);
  CHECK(dedup_labels({a, c}).size() == 2);

  std::vector<SegmentLabels> all = {a, b, c, a, c};
  auto family = [](const std::vector<SegmentLabels>& v) {
    std::set<LabelSet> f;
    for (const auto& s : v) f.insert(s.labels());
    return f;
  };
  auto kept = dedup_labels(all);
  CHECK(kept.size() == 2);
  CHECK(dedup_labels(kept).size() == kept.size());
  std::vector<std::size_t> idx = {0, 1, 2, 3, 4};
  do {
    std::vector<SegmentLabels> perm;
    for (auto i : idx) perm.push_back(all[i]);
    CHECK(family(dedup_labels(perm)) == family(kept));
  } while (std::next_permutation(idx.begin(), idx.end()));
}

TEST_CASE("first mention") {
  Timestamp y2018{2018, 5, 1, 0, 0, 0}, y2020{2020, 1, 1, 0, 0, 0}, y2019{2019, 1, 1, 0, 0, 0};
  std::vector<DatedLabels> tl = {{y2020, {cat("A"), cat("B")}}, {y2018, {cat("A")}}, {y2019, {}}};
  auto fm = first_mention(tl);
  CHECK(fm.at(cat("A")) == y2018);
  CHECK(fm.at(cat("B")) == y2020);
  CHECK(fm.count(cat("C")) == 0);
  std::mt19937 rng(53);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(tl.begin(), tl.end(), rng);
    CHECK(first_mention(tl) == fm);
  }
}

TEST_CASE("fleiss kappa") {
  // 10 items, 14 raters, 5 categories: kappa = 0.20993...
  std::vector<std::vector<int>> table = {{0, 0, 0, 0, 14}, {0, 2, 6, 4, 2}, {0, 0, 3, 5, 6},
                                         {0, 3, 9, 2, 0},  {2, 2, 8, 1, 1}, {7, 7, 0, 0, 0},
                                         {3, 2, 6, 3, 0},  {2, 5, 3, 2, 2}, {6, 5, 2, 1, 0},
                                         {0, 2, 2, 3, 7}};
  CHECK(fleiss_kappa(table) == doctest::Approx(0.20993).epsilon(1e-4));
  CHECK(fleiss_kappa({{3, 0}, {0, 3}}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fleiss_kappa({{3, 0}, {2, 0}}), DomainError);
}

TEST_CASE("annotation csv ingestion") {
  TempDir dir("privlens_ann");
  std::ofstream(dir.path / "a.csv")
      << "segment_id,policy_id,annotator,level,name,value,text\n"
         "s1,p1,1,category,First Party Collection/Use,,\"We collect, store and use data.\"\n"
         "s1,p1,2,category,first party collection/use,,\n"
         "s1,p1,1,attribute,Personal Information Type,Contact,\n"
         "s1,p1,2,attribute,Personal Information Type,contact,\n"
         "s1,p1,3,attribute,Personal Information Type,Location,\n"
         "s2,p1,1,category,User Choice/Control,,You may opt out.\n"
         "s2,p1,2,category,User Choice/Control,,\n";
  std::ofstream(dir.path / "notes.txt") << "ignored";
  auto segs = load_annotations(dir.path);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].text == "We collect, store and use data.");
  CHECK(segs[0].annotator_labels.size() == 3);
  auto labeled = consolidate_all(segs, LabelSchema::opp115());
  for (const auto& l : labeled[0].labels) MESSAGE(l.display());
  CHECK(labeled[0].labels ==
        LabelSet{cat("First Party Collection/Use"), Label::attribute("Personal Information Type", "Contact")});
  CHECK(labeled[1].labels == LabelSet{cat("User Choice & Control")});

  std::ofstream(dir.path / "b.csv") << "segment_id,text\ns9,x\n";
  CHECK_THROWS_AS(load_annotations(dir.path), ConfigError);
  CHECK_THROWS_AS(load_annotations(dir.path / "nope"), ConfigError);
}

TEST_CASE("OPP-115 layout ingestion") {
  TempDir dir("privlens_opp");
  fs::create_directories(dir.path / "annotations");
  fs::create_directories(dir.path / "sanitized_policies");
  std::ofstream(dir.path / "sanitized_policies" / "20_a.com.html")
      << "<strong>Privacy</strong> Policy|||<p>We collect your <b>email</b>.</p>|||You may opt out.";
  auto row = [](const char* ann, const char* seg, const char* cat, const char* attrs) {
    return std::string("1,1,") + ann + ",20," + seg + "," + cat + ",\"" + attrs + "\",1/1/15,http://a.com\n";
  };
  std::string pit = R"({""Personal Information Type"": {""selectedText"": ""email"", ""value"": ""Contact""}, ""Does/Does Not"": {""value"": ""Does""}})";
  std::ofstream(dir.path / "annotations" / "20_a.com.csv")
      << row("101", "1", "First Party Collection/Use", pit.c_str()) << row("102", "1", "First Party Collection/Use", pit.c_str())
      << row("103", "1", "Data Retention", "{}") << row("101", "2", "User Choice/Control", "{}")
      << row("102", "2", "User Choice/Control", "{}");
  auto segs = load_opp115(dir.path);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].id == "20:1");
  CHECK(segs[0].text == "We collect your email.");
  CHECK(segs[0].annotator_labels.size() == 3);
  auto labeled = consolidate_all(segs, LabelSchema::opp115());
  CHECK(labeled[0].labels == LabelSet{cat("First Party Collection/Use"), Label::attribute("Does/Does Not", "Does"),
                                     Label::attribute("Personal Information Type", "Contact")});
  CHECK(labeled[1].labels == LabelSet{cat("User Choice & Control")});
  CHECK(labeled[1].text == "You may opt out.");
  CHECK_THROWS_AS(load_opp115(dir.path / "none"), ConfigError);
}
