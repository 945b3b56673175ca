#include "privlens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "privlens/error.hpp"
#include "privlens/tokenize.hpp"

namespace privlens {

PoissonBinomial::PoissonBinomial(std::vector<double> probabilities)
    : probabilities_(std::move(probabilities)) {
  for (double p : probabilities_)
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("Poisson-Binomial probability outside [0,1]");
  pmf_.assign(probabilities_.size() + 1, 0.0);
  pmf_[0] = 1.0;
  std::size_t n = 0;
  for (double p : probabilities_) {
    ++n;
    for (std::size_t k = n; k > 0; --k) pmf_[k] = pmf_[k] * (1.0 - p) + pmf_[k - 1] * p;
    pmf_[0] *= (1.0 - p);
  }
}

double PoissonBinomial::mean() const {
  double m = 0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) m += static_cast<double>(k) * pmf_[k];
  return m;
}

double PoissonBinomial::cdf(std::size_t k) const {
  double c = 0;
  for (std::size_t i = 0; i <= k && i < pmf_.size(); ++i) c += pmf_[i];
  return c;
}

CountInterval prediction_interval(const PoissonBinomial& dist, double low, double high) {
  const auto& pmf = dist.pmf();
  CountInterval ci{pmf.size() - 1, pmf.size() - 1};
  bool have_low = false;
  double c = 0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    c += pmf[k];
    if (!have_low && c >= low) {
      ci.low = k;
      have_low = true;
    }
    if (c >= high) {
      ci.high = k;
      break;
    }
  }
  return ci;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean(xs);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  double h = (static_cast<double>(xs.size()) - 1.0) * q;
  auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= xs.size()) return xs.back();
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[lo + 1] - xs[lo]);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return xs[i] < xs[j]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

SeriesPoint summarize(std::span<const double> values) {
  SeriesPoint p;
  p.n = static_cast<long>(values.size());
  if (values.empty()) return p;
  p.mean = mean(values);
  double half = 0;
  if (values.size() > 1) half = 1.96 * std::sqrt(sample_variance(values) / static_cast<double>(values.size()));
  p.ci_low = p.mean - half;
  p.ci_high = p.mean + half;
  std::vector<double> v(values.begin(), values.end());
  p.q25 = quantile(v, 0.25);
  p.q75 = quantile(v, 0.75);
  return p;
}

MonthlySeries monthly_series(std::span<const std::pair<YearMonth, double>> observations) {
  std::map<YearMonth, std::vector<double>> groups;
  for (const auto& [m, v] : observations) groups[m].push_back(v);
  MonthlySeries out;
  for (const auto& [m, vs] : groups) out[m] = summarize(vs);
  return out;
}

double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) throw DomainError("incomplete_beta: x outside [0,1]");
  if (x == 0.0 || x == 1.0) return x;
  const double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  // Use the symmetry relation so the continued fraction converges quickly.
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);

  // Modified Lentz evaluation of the continued fraction.
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double f = d;
  for (int m = 1; m <= 10000; ++m) {
    const double dm = m;
    double num = dm * (b - dm) * x / ((a + 2 * dm - 1) * (a + 2 * dm));
    d = 1.0 + num * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    f *= c * d;
    num = -(a + dm) * (a + b + dm) * x / ((a + 2 * dm) * (a + 2 * dm + 1));
    d = 1.0 + num * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(ln_front) * f / a;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0)) throw DomainError("student_t_cdf: df must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
  return t > 0 ? 1.0 - tail : tail;
}

CohortComparison welch(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("welch: each sample needs >= 2 values");
  CohortComparison r;
  r.n1 = static_cast<long>(a.size());
  r.n2 = static_cast<long>(b.size());
  r.mean_a = mean(a);
  r.mean_b = mean(b);
  const double va = sample_variance(a);
  const double vb = sample_variance(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = va / na;
  const double sb = vb / nb;
  const double diff = r.mean_a - r.mean_b;
  const double pooled = std::sqrt(((na - 1) * va + (nb - 1) * vb) / (na + nb - 2));
  if (sa + sb == 0.0) {
    if (diff == 0.0) {
      r.t = 0;
      r.p_value = 1;
      r.cohens_d = 0;
    } else {
      const double inf = std::numeric_limits<double>::infinity();
      r.t = diff > 0 ? inf : -inf;
      r.p_value = 0;
      r.cohens_d = r.t;
    }
    r.df = na + nb - 2;
    return r;
  }
  r.t = diff / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1) + sb * sb / (nb - 1));
  r.p_value = std::min(1.0, incomplete_beta(r.df / 2.0, 0.5, r.df / (r.df + r.t * r.t)));
  r.cohens_d = pooled > 0 ? diff / pooled : 0.0;
  return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least two observations");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedInputError("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

const SiteVersion* in_force(const std::vector<SiteVersion>& versions, YearMonth m) {
  const SiteVersion* cur = nullptr;
  for (const auto& v : versions) {
    if (v.month <= m) cur = &v;
    else break;
  }
  return cur;
}

}  // namespace

std::vector<std::pair<std::string, const SiteVersion*>> versions_in_force(
    const SiteTimelines& timelines, YearMonth month,
    const std::map<std::string, YearMonth>& last_seen) {
  std::vector<std::pair<std::string, const SiteVersion*>> out;
  for (const auto& [site, versions] : timelines) {
    if (auto it = last_seen.find(site); it != last_seen.end() && it->second < month) continue;
    if (const SiteVersion* v = in_force(versions, month)) out.emplace_back(site, v);
  }
  return out;
}

UpdateRate update_rate(const SiteTimelines& timelines, YearMonth month,
                       const std::map<std::string, YearMonth>& last_seen) {
  UpdateRate r;
  const YearMonth prev = month.prev();
  for (const auto& [site, versions] : timelines) {
    if (auto it = last_seen.find(site); it != last_seen.end() && it->second < month) continue;
    const SiteVersion* now = in_force(versions, month);
    const SiteVersion* before = in_force(versions, prev);
    if (!now || !before) continue;
    ++r.sites;
    if (now == before) continue;
    auto a = split_sentences(before->text);
    auto b = split_sentences(now->text);
    std::set<std::string> sa(a.begin(), a.end());
    std::set<std::string> sb(b.begin(), b.end());
    if (sa != sb) ++r.updated;
  }
  r.fraction = r.sites == 0 ? 0.0 : static_cast<double>(r.updated) / static_cast<double>(r.sites);
  return r;
}

Cohorts cohort_split(const std::map<std::string, std::vector<bool>>& site_mentions) {
  Cohorts c;
  for (const auto& [site, flags] : site_mentions) {
    bool any = std::any_of(flags.begin(), flags.end(), [](bool b) { return b; });
    (any ? c.mentions : c.non_mentions).insert(site);
  }
  return c;
}

}  // namespace privlens
