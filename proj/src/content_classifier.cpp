#include "privlens/content_classifier.hpp"

#include <algorithm>
#include <json.hpp>
#include <numeric>
#include <random>

#include "privlens/corpus.hpp"
#include "privlens/csv.hpp"
#include "privlens/error.hpp"
#include "privlens/html.hpp"
#include "privlens/tokenize.hpp"

namespace privlens {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::vector<AnnotatedSegment> load_annotations(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("annotation directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no .csv files in " + dir.string());

  std::vector<AnnotatedSegment> out;
  std::map<std::string, std::size_t> at;
  const std::vector<std::string> header = {"segment_id", "policy_id", "annotator", "level",
                                           "name", "value", "text"};
  for (const auto& f : files) {
    auto rows = csv::parse(read_file(f));
    if (rows.empty()) continue;
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < rows[0].size(); ++i) col[to_lower(collapse_whitespace(rows[0][i]))] = i;
    for (const auto& h : header)
      if (!col.count(h)) throw ConfigError(f.string() + ": missing column '" + h + "'");
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      auto get = [&](const std::string& h) -> std::string {
        std::size_t i = col[h];
        return i < row.size() ? row[i] : std::string();
      };
      std::string id = get("segment_id");
      if (id.empty()) throw ConfigError(f.string() + ":" + std::to_string(r + 1) + ": empty segment_id");
      auto [it, fresh] = at.emplace(id, out.size());
      if (fresh) out.push_back({id, get("policy_id"), "", {}});
      auto& seg = out[it->second];
      if (seg.text.empty()) seg.text = get("text");
      std::string annotator = get("annotator");
      std::string level = to_lower(get("level"));
      std::string name = collapse_whitespace(get("name"));
      if (annotator.empty() || name.empty()) continue;  // text-only row
      Label l;
      if (level == "category") l = Label::category(name);
      else if (level == "attribute") l = Label::attribute(name, collapse_whitespace(get("value")));
      else throw ConfigError(f.string() + ":" + std::to_string(r + 1) + ": bad level '" + level + "'");
      seg.annotator_labels[annotator].insert(std::move(l));
    }
  }
  return out;
}

std::vector<AnnotatedSegment> load_opp115(const fs::path& root, std::size_t max_policies) {
  const fs::path ann_dir = root / "annotations", text_dir = root / "sanitized_policies";
  if (!fs::is_directory(ann_dir) || !fs::is_directory(text_dir))
    throw ConfigError(root.string() + ": expected annotations/ and sanitized_policies/");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(ann_dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (max_policies && files.size() > max_policies) files.resize(max_policies);

  std::vector<AnnotatedSegment> out;
  for (const auto& f : files) {
    // Segments are separated by "|||" in the sanitized HTML.
    fs::path html_file = text_dir / (f.stem().string() + ".html");
    if (!fs::exists(html_file)) throw ConfigError("missing policy text " + html_file.string());
    std::string html_text = read_file(html_file);
    std::vector<std::string> texts;
    for (std::size_t start = 0;;) {
      auto end = html_text.find("|||", start);
      auto piece = std::string_view(html_text).substr(start, end == std::string::npos ? end : end - start);
      texts.push_back(collapse_whitespace(html::inner_text(*html::parse(piece).root)));
      if (end == std::string::npos) break;
      start = end + 3;
    }
    std::map<int, std::size_t> at;
    // annotation_id, batch_id, annotator_id, policy_id, segment_id, category_name,
    // attribute_value_pairs (JSON), date, policy_url
    auto rows = csv::parse(read_file(f));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() < 7) continue;
      int seg_id = 0;
      try {
        seg_id = std::stoi(row[4]);
      } catch (const std::exception&) {
        continue;  // header or malformed
      }
      if (seg_id < 0 || static_cast<std::size_t>(seg_id) >= texts.size())
        throw ConfigError(f.string() + ": segment " + row[4] + " out of range");
      auto [it, fresh] = at.emplace(seg_id, out.size());
      if (fresh) out.push_back({row[3] + ":" + row[4], row[3], texts[seg_id], {}});
      auto& labels = out[it->second].annotator_labels[row[2]];
      labels.insert(Label::category(collapse_whitespace(row[5])));
      nlohmann::json attrs;
      try {
        attrs = nlohmann::json::parse(row[6]);
      } catch (const nlohmann::json::exception&) {
        throw ConfigError(f.string() + ":" + std::to_string(r + 1) + ": bad attribute JSON");
      }
      for (const auto& [name, v] : attrs.items())
        if (v.is_object() && v.contains("value") && v["value"].is_string())
          labels.insert(Label::attribute(collapse_whitespace(name), collapse_whitespace(v["value"].get<std::string>())));
    }
  }
  return out;
}

std::vector<LabeledSegment> consolidate_all(const std::vector<AnnotatedSegment>& segments,
                                            const LabelSchema& schema, int min_agree) {
  std::vector<LabeledSegment> out;
  out.reserve(segments.size());
  for (const auto& s : segments) {
    LabelSet kept;
    for (const auto& l : consolidate(s, min_agree, &schema))
      if (auto c = schema.canonical(l)) kept.insert(*c);
    out.push_back({s.id, s.policy_id, s.text, std::move(kept)});
  }
  return out;
}

std::vector<int> iterative_stratified_split(const LabelMatrix& y, const std::vector<double>& ratios,
                                            std::uint64_t seed) {
  const std::size_t n = y.size();
  const int k = static_cast<int>(ratios.size());
  if (k == 0) throw DomainError("stratified split: no folds");
  for (double r : ratios)
    if (!(r > 0)) throw DomainError("stratified split: ratios must be positive");
  std::vector<int> fold(n, -1);
  if (n == 0) return fold;
  const std::size_t L = y[0].size();
  const double total = std::accumulate(ratios.begin(), ratios.end(), 0.0);

  std::vector<double> capacity(k);
  for (int j = 0; j < k; ++j) capacity[j] = static_cast<double>(n) * ratios[j] / total;
  std::vector<std::vector<double>> demand(L, std::vector<double>(k));
  for (std::size_t l = 0; l < L; ++l) {
    double count = 0;
    for (const auto& row : y) count += row[l];
    for (int j = 0; j < k; ++j) demand[l][j] = count * ratios[j] / total;
  }

  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<int>& tied) {
    if (tied.size() == 1) return tied[0];
    std::uniform_int_distribution<std::size_t> u(0, tied.size() - 1);
    return tied[u(rng)];
  };
  auto argmax = [](const std::vector<int>& among, auto&& value) {
    std::vector<int> best;
    double top = -1e300;
    for (int j : among) {
      double v = value(j);
      if (v > top + 1e-9) {
        top = v;
        best = {j};
      } else if (std::abs(v - top) <= 1e-9) {
        best.push_back(j);
      }
    }
    return best;
  };
  std::vector<int> all(k);
  std::iota(all.begin(), all.end(), 0);
  auto assign = [&](std::size_t i, int j) {
    fold[i] = j;
    capacity[j] -= 1;
    for (std::size_t l = 0; l < L; ++l)
      if (y[i][l]) demand[l][j] -= 1;
  };

  std::size_t remaining = n;
  while (remaining > 0) {
    // Rarest label among unassigned rows.
    std::size_t rare = L;
    long fewest = 0;
    for (std::size_t l = 0; l < L; ++l) {
      long c = 0;
      for (std::size_t i = 0; i < n; ++i) c += fold[i] < 0 && y[i][l];
      if (c > 0 && (rare == L || c < fewest)) {
        rare = l;
        fewest = c;
      }
    }
    if (rare == L) break;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold[i] >= 0 || !y[i][rare]) continue;
      auto by_demand = argmax(all, [&](int j) { return demand[rare][j]; });
      auto by_capacity = argmax(by_demand, [&](int j) { return capacity[j]; });
      assign(i, pick(by_capacity));
      --remaining;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (fold[i] >= 0) continue;
    assign(i, pick(argmax(all, [&](int j) { return capacity[j]; })));
  }
  return fold;
}

std::size_t SplitAssignment::count(Subset s) const {
  return static_cast<std::size_t>(std::count(subset.begin(), subset.end(), s));
}

LabelMatrix label_matrix(const std::vector<LabeledSegment>& segments,
                         const std::vector<Label>& label_space) {
  LabelMatrix y;
  y.reserve(segments.size());
  for (const auto& s : segments) {
    std::vector<std::uint8_t> row(label_space.size(), 0);
    for (std::size_t l = 0; l < label_space.size(); ++l) row[l] = s.labels.count(label_space[l]) > 0;
    y.push_back(std::move(row));
  }
  return y;
}

SplitAssignment stratified_split(const std::vector<LabeledSegment>& segments,
                                 const std::vector<Label>& label_space, std::uint64_t seed,
                                 const std::vector<double>& ratios) {
  if (ratios.size() != 3) throw DomainError("stratified_split: expected three ratios");
  auto folds = iterative_stratified_split(label_matrix(segments, label_space), ratios, seed);
  SplitAssignment a;
  for (int f : folds) a.subset.push_back(static_cast<Subset>(f));
  return a;
}

namespace {

std::vector<std::string> texts_of(const std::vector<const LabeledSegment*>& segs) {
  std::vector<std::string> t;
  for (const auto* s : segs) t.push_back(s->text);
  return t;
}

}  // namespace

ModelBundle train_hierarchy(const std::vector<LabeledSegment>& train, const LabelSchema& schema,
                            const BackendFactory& backend) {
  if (train.empty()) throw DomainError("train_hierarchy: empty training set");
  ModelBundle b;
  b.schema = schema;

  std::vector<const LabeledSegment*> all;
  for (const auto& s : train) all.push_back(&s);
  b.top = backend();
  b.top->fit(texts_of(all), label_matrix(train, schema.category_labels()));

  for (const auto& attr : schema.attributes()) {
    std::vector<LabeledSegment> subset;
    for (const auto& s : train) {
      bool bound = false;
      for (const auto& c : attr.categories) bound = bound || s.labels.count(Label::category(c));
      if (bound) subset.push_back(s);
    }
    auto space = schema.attribute_labels(attr.name);
    auto y = label_matrix(subset, space);
    std::set<std::vector<std::uint8_t>> patterns(y.begin(), y.end());
    if (patterns.size() < 2) {
      b.untrainable.insert(attr.name);
      continue;
    }
    std::vector<const LabeledSegment*> ptrs;
    for (const auto& s : subset) ptrs.push_back(&s);
    auto m = backend();
    m->fit(texts_of(ptrs), y);
    b.attributes[attr.name] = std::move(m);
  }
  return b;
}

void ModelBundle::save(const fs::path& dir) const {
  if (!top) throw DomainError("cannot save an untrained bundle");
  fs::create_directories(dir);
  schema.save(dir / "schema.json");
  top->save(dir / "top.json");
  ordered_json manifest;
  manifest["backend"] = top->kind();
  manifest["top"] = "top.json";
  manifest["attributes"] = ordered_json::object();
  int i = 0;
  for (const auto& a : schema.attributes()) {
    auto it = attributes.find(a.name);
    if (it == attributes.end()) continue;
    std::string file = "attr_" + std::to_string(i++) + ".json";
    it->second->save(dir / file);
    manifest["attributes"][a.name] = file;
  }
  manifest["untrainable"] = untrainable;
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

ModelBundle ModelBundle::load(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json"))
    throw ConfigError("no model bundle at " + dir.string() + " (run the train command first)");
  ModelBundle b;
  try {
    auto manifest = ordered_json::parse(read_file(dir / "manifest.json"));
    b.schema = LabelSchema::load(dir / "schema.json");
    b.top = load_backend(dir / manifest.at("top").get<std::string>());
    for (const auto& [name, file] : manifest.at("attributes").items())
      b.attributes[name] = load_backend(dir / file.get<std::string>());
    for (const auto& u : manifest.at("untrainable")) b.untrainable.insert(u.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(dir.string() + ": " + e.what());
  }
  if (b.top->label_count() != b.schema.categories().size())
    throw SchemaError(dir.string() + ": top-level model does not match the schema");
  return b;
}

LabelSet SegmentLabels::labels(double threshold) const {
  LabelSet out;
  for (const auto& [c, p] : category_probs)
    if (p > threshold) out.insert(Label::category(c));
  for (const auto& [av, p] : attribute_probs)
    if (p > threshold) out.insert(Label::attribute(av.first, av.second));
  return out;
}

SegmentLabels label_segment(std::string_view text, const ModelBundle& bundle, double threshold) {
  if (!bundle.trained()) throw DomainError("label_segment: bundle is not trained");
  SegmentLabels out;
  const auto& cats = bundle.schema.categories();
  auto probs = bundle.top->predict_proba(text);
  std::set<std::string> active;
  for (std::size_t i = 0; i < cats.size(); ++i) {
    out.category_probs[cats[i]] = probs[i];
    if (probs[i] > threshold) active.insert(cats[i]);
  }
  for (const auto& attr : bundle.schema.attributes()) {
    bool bound = false;
    for (const auto& c : attr.categories) bound = bound || active.count(c);
    if (!bound) continue;
    auto it = bundle.attributes.find(attr.name);
    if (it == bundle.attributes.end()) continue;
    auto ap = it->second->predict_proba(text);
    for (std::size_t v = 0; v < attr.values.size() && v < ap.size(); ++v)
      out.attribute_probs[{attr.name, attr.values[v]}] = ap[v];
  }
  return out;
}

Evaluation evaluate(const LabelMatrix& truth, const LabelMatrix& predicted,
                    const std::vector<std::string>& names) {
  if (truth.size() != predicted.size()) throw DomainError("evaluate: row count mismatch");
  const std::size_t L = names.size();
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (truth[i].size() != L || predicted[i].size() != L)
      throw DomainError("evaluate: column count mismatch");
  Evaluation e;
  long TP = 0, FP = 0, FN = 0;
  auto ratio = [](long a, long b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  auto f1 = [](double p, double r) { return p + r == 0 ? 0.0 : 2 * p * r / (p + r); };
  for (std::size_t l = 0; l < L; ++l) {
    LabelScore s;
    s.label = names[l];
    for (std::size_t i = 0; i < truth.size(); ++i) {
      bool t = truth[i][l], p = predicted[i][l];
      s.tp += t && p;
      s.fp += !t && p;
      s.fn += t && !p;
    }
    s.support = s.tp + s.fn;
    s.precision_defined = s.tp + s.fp > 0;
    s.precision = ratio(s.tp, s.tp + s.fp);
    s.recall = ratio(s.tp, s.tp + s.fn);
    s.f1 = f1(s.precision, s.recall);
    TP += s.tp;
    FP += s.fp;
    FN += s.fn;
    e.macro_precision += s.precision;
    e.macro_recall += s.recall;
    e.macro_f1 += s.f1;
    e.per_label.push_back(s);
  }
  if (L > 0) {
    e.macro_precision /= static_cast<double>(L);
    e.macro_recall /= static_cast<double>(L);
    e.macro_f1 /= static_cast<double>(L);
  }
  e.micro_precision = ratio(TP, TP + FP);
  e.micro_recall = ratio(TP, TP + FN);
  e.micro_f1 = f1(e.micro_precision, e.micro_recall);
  return e;
}

PrecisionFilter precision_filter(const Evaluation& eval, double min_precision) {
  PrecisionFilter f;
  for (const auto& s : eval.per_label) {
    if (!s.precision_defined) {
      f.undefined.insert(s.label);
      f.excluded.insert(s.label);
    } else if (s.precision < min_precision) {
      f.excluded.insert(s.label);
    }
  }
  return f;
}

std::vector<std::size_t> dedup_label_indices(const std::vector<SegmentLabels>& policy,
                                             double threshold) {
  std::set<LabelSet> seen;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < policy.size(); ++i)
    if (seen.insert(policy[i].labels(threshold)).second) keep.push_back(i);
  return keep;
}

std::vector<SegmentLabels> dedup_labels(const std::vector<SegmentLabels>& policy, double threshold) {
  std::vector<SegmentLabels> out;
  for (auto i : dedup_label_indices(policy, threshold)) out.push_back(policy[i]);
  return out;
}

std::map<Label, Timestamp> first_mention(const std::vector<DatedLabels>& timeline) {
  std::map<Label, Timestamp> out;
  for (const auto& d : timeline)
    for (const auto& l : d.labels) {
      auto it = out.find(l);
      if (it == out.end() || d.date < it->second) out[l] = d.date;
    }
  return out;
}

double fleiss_kappa(const std::vector<std::vector<int>>& counts) {
  if (counts.empty()) throw DomainError("fleiss_kappa: no items");
  const std::size_t k = counts[0].size();
  long raters = -1;
  std::vector<double> col(k, 0.0);
  double p_bar = 0;
  for (const auto& row : counts) {
    if (row.size() != k) throw DomainError("fleiss_kappa: ragged table");
    long n = 0;
    double sq = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (row[j] < 0) throw DomainError("fleiss_kappa: negative count");
      n += row[j];
      sq += static_cast<double>(row[j]) * row[j];
      col[j] += row[j];
    }
    if (raters < 0) raters = n;
    if (n != raters || n < 2) throw DomainError("fleiss_kappa: every item needs the same number (>= 2) of ratings");
    p_bar += (sq - static_cast<double>(n)) / (static_cast<double>(n) * (n - 1));
  }
  const double N = static_cast<double>(counts.size());
  p_bar /= N;
  double p_e = 0;
  for (double c : col) {
    double pj = c / (N * static_cast<double>(raters));
    p_e += pj * pj;
  }
  if (p_e == 1.0) throw DomainError("fleiss_kappa: undefined when every rating is the same category");
  return (p_bar - p_e) / (1.0 - p_e);
}

}  // namespace privlens
