#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "privlens/dates.hpp"

namespace privlens {

struct SeriesPoint {
  double mean = 0;
  double ci_low = 0;
  double ci_high = 0;
  double q25 = 0;
  double q75 = 0;
  long n = 0;
};

using MonthlySeries = std::map<YearMonth, SeriesPoint>;

struct CohortComparison {
  double t = 0;
  double df = 0;
  double p_value = 1;
  double cohens_d = 0;
  double mean_a = 0;
  double mean_b = 0;
  long n1 = 0;
  long n2 = 0;
};

class PoissonBinomial {
 public:
  // Exact pmf by sequential convolution. Throws DomainError for p outside
  // [0,1] or NaN.
  explicit PoissonBinomial(std::vector<double> probabilities);

  const std::vector<double>& probabilities() const { return probabilities_; }
  const std::vector<double>& pmf() const { return pmf_; }
  double mean() const;
  double cdf(std::size_t k) const;

 private:
  std::vector<double> probabilities_;
  std::vector<double> pmf_;
};

struct CountInterval {
  std::size_t low = 0;
  std::size_t high = 0;
};

// k_low = smallest k with CDF(k) >= low; k_high = smallest k with CDF(k) >= high.
CountInterval prediction_interval(const PoissonBinomial& dist, double low = 0.025,
                                  double high = 0.975);

double mean(std::span<const double> xs);
// Sample (n-1) variance; 0 for fewer than two values.
double sample_variance(std::span<const double> xs);
// Type-7 quantile (linear interpolation between order statistics).
double quantile(std::vector<double> xs, double q);
// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

SeriesPoint summarize(std::span<const double> values);
MonthlySeries monthly_series(std::span<const std::pair<YearMonth, double>> observations);

// Welch's unequal-variance t-test, two-sided; Cohen's d with pooled sd.
// Throws std::invalid_argument when either sample has fewer than two values.
CohortComparison welch(std::span<const double> a, std::span<const double> b);

// Throws std::invalid_argument on length mismatch / n < 2 and
// UndefinedInputError on zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

// Regularised incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);
// CDF of Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

// Per-site chronology of distinct policy texts: (first month in force, text).
struct SiteVersion {
  YearMonth month;
  std::string text;
};
using SiteTimelines = std::map<std::string, std::vector<SiteVersion>>;

// Version in force for each site in `month`: the latest version dated at or
// before it, for sites not retired before `month` per last_seen.
std::vector<std::pair<std::string, const SiteVersion*>> versions_in_force(
    const SiteTimelines& timelines, YearMonth month,
    const std::map<std::string, YearMonth>& last_seen = {});

struct UpdateRate {
  long updated = 0;
  long sites = 0;
  double fraction = 0;
};

// Fraction of sites whose sentence set in `month` differs from the previous
// month's. A site participates only when a version is in force in both
// months; a version stays in force until the next one, through the last month
// of its site (see last_seen).
UpdateRate update_rate(const SiteTimelines& timelines, YearMonth month,
                       const std::map<std::string, YearMonth>& last_seen = {});

struct Cohorts {
  std::set<std::string> mentions;
  std::set<std::string> non_mentions;
};

// site -> whether each of its policy versions mentions the term
Cohorts cohort_split(const std::map<std::string, std::vector<bool>>& site_mentions);

}  // namespace privlens
