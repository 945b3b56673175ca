#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "privlens/dates.hpp"
#include "privlens/labels.hpp"
#include "privlens/linear_model.hpp"

namespace privlens {

struct LabeledSegment {
  std::string id;
  std::string policy_id;
  std::string text;
  LabelSet labels;
};

// Annotation CSVs: every *.csv file under `dir` with the header
//   segment_id,policy_id,annotator,level,name,value,text
// level is "category" or "attribute"; value is empty for categories; text
// need only be present on one row per segment. Throws ConfigError.
std::vector<AnnotatedSegment> load_annotations(const std::filesystem::path& dir);

// The OPP-115 release layout: annotations/<policy>.csv (one row per
// annotator and data practice, attributes as a JSON object of
// {"attribute": {"value": ...}}) and sanitized_policies/<policy>.html with
// segments separated by "|||". Policies are taken in file-name order, at most
// max_policies of them (0 = all). Throws ConfigError.
std::vector<AnnotatedSegment> load_opp115(const std::filesystem::path& root, std::size_t max_policies = 0);

// Consolidated labels restricted to the schema (labels outside it are
// dropped), in input order.
std::vector<LabeledSegment> consolidate_all(const std::vector<AnnotatedSegment>& segments,
                                            const LabelSchema& schema, int min_agree = 2);

// Iterative stratification for multi-label data. Returns a fold index per
// row. Rarest label first; each of its remaining rows goes to the fold with
// the largest remaining demand for that label, ties broken by the fold's
// remaining capacity and then by the seeded generator. Unlabeled rows fill
// remaining capacity last.
std::vector<int> iterative_stratified_split(const LabelMatrix& y, const std::vector<double>& ratios,
                                            std::uint64_t seed);

enum class Subset { train = 0, validation = 1, test = 2 };

struct SplitAssignment {
  std::vector<Subset> subset;  // parallel to the input
  std::size_t count(Subset s) const;
};

SplitAssignment stratified_split(const std::vector<LabeledSegment>& segments,
                                 const std::vector<Label>& label_space,
                                 std::uint64_t seed,
                                 const std::vector<double>& ratios = {3, 1, 1});

LabelMatrix label_matrix(const std::vector<LabeledSegment>& segments,
                         const std::vector<Label>& label_space);

// One top-level model over the categories plus one model per attribute.
// Attributes whose training data show fewer than two distinct label
// patterns are listed as untrainable and skipped when labeling.
class ModelBundle {
 public:
  LabelSchema schema;
  std::unique_ptr<ClassifierBackend> top;
  std::map<std::string, std::unique_ptr<ClassifierBackend>> attributes;
  std::set<std::string> untrainable;

  bool trained() const { return top != nullptr; }

  // Directory with manifest.json, schema.json, top.json and one
  // attr_<n>.json per trained attribute.
  void save(const std::filesystem::path& dir) const;
  static ModelBundle load(const std::filesystem::path& dir);
};

ModelBundle train_hierarchy(const std::vector<LabeledSegment>& train, const LabelSchema& schema,
                            const BackendFactory& backend);

struct SegmentLabels {
  std::map<std::string, double> category_probs;
  std::map<std::pair<std::string, std::string>, double> attribute_probs;

  // Labels whose probability exceeds `threshold`.
  LabelSet labels(double threshold = 0.5) const;
};

inline constexpr double kDecisionThreshold = 0.5;

// Throws DomainError for an untrained bundle.
SegmentLabels label_segment(std::string_view text, const ModelBundle& bundle,
                            double threshold = kDecisionThreshold);

struct LabelScore {
  std::string label;
  long tp = 0, fp = 0, fn = 0;
  long support = 0;
  double precision = 0, recall = 0, f1 = 0;
  bool precision_defined = true;  // false when nothing was predicted
};

struct Evaluation {
  std::vector<LabelScore> per_label;
  double micro_precision = 0, micro_recall = 0, micro_f1 = 0;
  double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
};

// Undefined ratios count as 0, as do F1 scores with P + R = 0.
Evaluation evaluate(const LabelMatrix& truth, const LabelMatrix& predicted,
                    const std::vector<std::string>& label_names);

struct PrecisionFilter {
  std::set<std::string> excluded;   // includes the undefined ones
  std::set<std::string> undefined;  // no predicted positives
};

PrecisionFilter precision_filter(const Evaluation& eval, double min_precision = 0.75);

// Indices of the first segment of each distinct thresholded label set.
std::vector<std::size_t> dedup_label_indices(const std::vector<SegmentLabels>& policy,
                                             double threshold = kDecisionThreshold);
std::vector<SegmentLabels> dedup_labels(const std::vector<SegmentLabels>& policy,
                                        double threshold = kDecisionThreshold);

struct DatedLabels {
  Timestamp date;
  LabelSet labels;
};

// Earliest date at which each label appears in one site's timeline.
std::map<Label, Timestamp> first_mention(const std::vector<DatedLabels>& timeline);

// Fleiss' kappa from an items x categories table of rating counts; every
// row must sum to the same number of raters (>= 2). Throws DomainError.
double fleiss_kappa(const std::vector<std::vector<int>>& counts);

}  // namespace privlens
