#include "privlens/archive_client.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <json.hpp>
#include <thread>

#include "privlens/error.hpp"

namespace privlens {

namespace {

std::string two(int v) {
  std::string s = std::to_string(v);
  return s.size() < 2 ? "0" + s : s;
}

std::string host_of(const std::string& base) {
  std::string h = base;
  if (auto p = h.find("://"); p != std::string::npos) h = h.substr(p + 3);
  if (auto p = h.find('/'); p != std::string::npos) h.resize(p);
  return h;
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

void sleep_seconds(double s) {
  if (s > 0) std::this_thread::sleep_for(std::chrono::duration<double>(s));
}

}  // namespace

SnapshotSchedule SnapshotSchedule::monthly_only(YearMonth start) {
  SnapshotSchedule s;
  s.yearly_range = {1, 0};
  s.quarterly_range = {1, 0};
  s.monthly_start = start;
  return s;
}

void SnapshotSchedule::validate() const {
  if (!yearly_range.empty() && !quarterly_range.empty() &&
      yearly_range.last >= quarterly_range.first)
    throw ConfigError("schedule: yearly range must end before the quarterly range");
  int last = !quarterly_range.empty() ? quarterly_range.last
             : !yearly_range.empty()  ? yearly_range.last
                                      : monthly_start.year - 1;
  if (monthly_start.year <= last)
    throw ConfigError("schedule: monthly start must follow the quarterly range");
  if (monthly_start.month < 1 || monthly_start.month > 12)
    throw ConfigError("schedule: bad monthly start month");
}

std::optional<std::string> schedule_bucket(const SnapshotSchedule& s, const Timestamp& t) {
  if (s.yearly_range.contains(t.year)) return "Y" + std::to_string(t.year);
  if (s.quarterly_range.contains(t.year))
    return "Q" + std::to_string(t.year) + "-" + std::to_string(t.year_month().quarter());
  if (t.year_month() >= s.monthly_start) return "M" + std::to_string(t.year) + "-" + two(t.month);
  return std::nullopt;
}

std::vector<CdxEntry> build_schedule(const SnapshotSchedule& schedule,
                                     const std::vector<CdxEntry>& available) {
  // Input is sorted, but pick the minimum explicitly so unsorted input still
  // honours the earliest-per-bucket rule.
  std::map<std::string, std::size_t> best;
  for (std::size_t i = 0; i < available.size(); ++i) {
    auto b = schedule_bucket(schedule, available[i].archive_timestamp);
    if (!b) continue;
    auto it = best.find(*b);
    if (it == best.end() ||
        available[i].archive_timestamp < available[it->second].archive_timestamp)
      best[*b] = i;
  }
  std::vector<std::size_t> idx;
  for (const auto& [b, i] : best) idx.push_back(i);
  std::sort(idx.begin(), idx.end());
  std::vector<CdxEntry> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(available[i]);
  return out;
}

std::vector<CdxEntry> parse_cdx_json(std::string_view body, const WarningHandler& warn) {
  auto report = [&](const std::string& m) {
    if (warn) warn(m);
  };
  std::vector<CdxEntry> out;
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_array()) {
    if (body.find_first_not_of(" \t\r\n") != std::string_view::npos) report("cdx: response is not a JSON array");
    return out;
  }
  if (j.empty()) return out;
  // Column positions from the header row, falling back to the default layout.
  int c_ts = 1, c_orig = 2, c_status = 4, c_digest = 5;
  std::size_t first = 0;
  if (j[0].is_array() && !j[0].empty() && j[0][0].is_string() && j[0][0] == "urlkey") {
    const auto& h = j[0];
    for (int i = 0; i < static_cast<int>(h.size()); ++i) {
      if (!h[i].is_string()) continue;
      const auto& name = h[i].get_ref<const std::string&>();
      if (name == "timestamp") c_ts = i;
      else if (name == "original") c_orig = i;
      else if (name == "statuscode") c_status = i;
      else if (name == "digest") c_digest = i;
    }
    first = 1;
  }
  int need = std::max({c_ts, c_orig, c_status, c_digest}) + 1;
  for (std::size_t r = first; r < j.size(); ++r) {
    const auto& row = j[r];
    auto bad = [&](const std::string& why) {
      report("cdx: skipping row " + std::to_string(r) + ": " + why);
    };
    if (!row.is_array() || static_cast<int>(row.size()) < need) {
      bad("wrong column count");
      continue;
    }
    bool strings = true;
    for (int c : {c_ts, c_orig, c_status, c_digest}) strings = strings && row[c].is_string();
    if (!strings) {
      bad("non-string field");
      continue;
    }
    const auto& ts_s = row[c_ts].get_ref<const std::string&>();
    auto ts = ts_s.size() == 14 ? Timestamp::parse_cdx(ts_s) : std::nullopt;
    if (!ts) {
      bad("bad timestamp '" + ts_s + "'");
      continue;
    }
    const auto& st = row[c_status].get_ref<const std::string&>();
    int status = 0;
    bool numeric = !st.empty() && st.size() <= 3;
    for (char ch : st) numeric = numeric && ch >= '0' && ch <= '9';
    if (numeric) status = std::stoi(st);
    if (!numeric || status < 100 || status > 599) {
      bad("bad status '" + st + "'");
      continue;
    }
    const auto& orig = row[c_orig].get_ref<const std::string&>();
    if (orig.empty()) {
      bad("empty url");
      continue;
    }
    out.push_back({orig, *ts, status, row[c_digest].get<std::string>()});
  }
  std::stable_sort(out.begin(), out.end(), [](const CdxEntry& a, const CdxEntry& b) {
    return a.archive_timestamp < b.archive_timestamp;
  });
  return out;
}

void FetchPolicy::validate() const {
  if (!(timeout > 0)) throw ConfigError("fetch policy: timeout must be positive");
  if (!(min_delay_between_requests >= 0)) throw ConfigError("fetch policy: min_delay must be >= 0");
  if (max_retries < 0) throw ConfigError("fetch policy: max_retries must be >= 0");
  if (!(backoff_base >= 0)) throw ConfigError("fetch policy: backoff_base must be >= 0");
}

void HostThrottle::run(const std::string& host, double min_delay,
                       const std::function<void()>& request) {
  Slot* slot;
  {
    std::lock_guard lock(mu_);
    auto& p = slots_[host];
    if (!p) p = std::make_unique<Slot>();
    slot = p.get();
  }
  std::lock_guard busy(slot->busy);
  if (slot->last_start) {
    auto ready = *slot->last_start + std::chrono::duration_cast<Clock::duration>(
                                         std::chrono::duration<double>(min_delay));
    std::this_thread::sleep_until(ready);
  }
  slot->last_start = Clock::now();
  request();
}

std::shared_ptr<HostThrottle> HostThrottle::shared() {
  static auto instance = std::make_shared<HostThrottle>();
  return instance;
}

std::string strip_archive_prefix(std::string_view href) {
  // "/web/20190101000000/http://..." or the absolute form with "id_"/"im_" flags
  auto pos = href.find("/web/");
  if (pos == std::string_view::npos) return std::string(href);
  std::size_t i = pos + 5, digits = 0;
  while (i < href.size() && std::isdigit(static_cast<unsigned char>(href[i]))) ++i, ++digits;
  if (digits < 4) return std::string(href);
  while (i < href.size() && (std::isalpha(static_cast<unsigned char>(href[i])) || href[i] == '_')) ++i;
  if (i >= href.size() || href[i] != '/') return std::string(href);
  return std::string(href.substr(i + 1));
}

std::string resolve_href(std::string_view page_url, std::string_view href_in) {
  std::string href = strip_archive_prefix(href_in);
  auto scheme_end = page_url.find("://");
  std::string scheme = scheme_end == std::string_view::npos ? "http" : std::string(page_url.substr(0, scheme_end));
  std::string_view rest = scheme_end == std::string_view::npos ? page_url : page_url.substr(scheme_end + 3);
  auto slash = rest.find('/');
  std::string host(rest.substr(0, slash));
  std::string path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (auto q = path.find_first_of("?#"); q != std::string::npos) path.erase(q);

  if (href.find("://") != std::string::npos) return href;
  if (href.rfind("//", 0) == 0) return scheme + ":" + href;
  if (href.empty()) return scheme + "://" + host + path;
  if (href[0] == '/') return scheme + "://" + host + href;
  if (href[0] == '?' || href[0] == '#') return scheme + "://" + host + path + href;
  return scheme + "://" + host + path.substr(0, path.rfind('/') + 1) + href;
}

std::string percent_encode(std::string_view s) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

ArchiveClient::ArchiveClient(std::string base_url, FetchPolicy policy,
                             std::shared_ptr<HostThrottle> throttle)
    : base_(std::move(base_url)), policy_(policy), throttle_(std::move(throttle)) {
  while (!base_.empty() && base_.back() == '/') base_.pop_back();
  policy_.validate();
  if (!throttle_) throttle_ = HostThrottle::shared();
}

std::string ArchiveClient::cdx_query_path(std::string_view url) const {
  return "/cdx/search/cdx?url=" + percent_encode(url) + "&output=json";
}

std::string ArchiveClient::snapshot_path(const CdxEntry& entry) const {
  return "/web/" + entry.archive_timestamp.to_cdx() + "/" + entry.original_url;
}

FetchResult ArchiveClient::get(const std::string& path, const FetchPolicy& policy) const {
  policy.validate();
  const std::string host = host_of(base_);
  std::string last_error;
  for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
    if (attempt > 0) sleep_seconds(policy.backoff_base * std::pow(2.0, attempt - 1));
    FetchResult r;
    httplib::Error err = httplib::Error::Success;
    throttle_->run(host, policy.min_delay_between_requests, [&] {
      httplib::Client cli(base_);
      auto secs = std::chrono::duration<double>(policy.timeout);
      auto us = std::chrono::duration_cast<std::chrono::microseconds>(secs);
      cli.set_connection_timeout(us);
      cli.set_read_timeout(us);
      cli.set_write_timeout(us);
      cli.set_follow_location(true);
      const auto start = std::chrono::steady_clock::now();
      auto res = cli.Get(
          path,
          [&](const httplib::Response& resp) {
            r.status = resp.status;
            return true;
          },
          [&](const char* data, size_t len) {
            r.body.append(data, len);
            return std::chrono::steady_clock::now() - start < secs;
          });
      err = res.error();
      if (res) r.status = res->status;
    });
    if (err == httplib::Error::Success) {
      if (r.status == 404 || r.status == 410) throw PermanentMissingError(path + ": HTTP " + std::to_string(r.status));
      if (retryable_status(r.status)) {
        last_error = "HTTP " + std::to_string(r.status);
        continue;
      }
      if (r.status >= 400) throw PermanentMissingError(path + ": HTTP " + std::to_string(r.status));
      return r;
    }
    // Timed out or cut off mid-body: keep what arrived.
    if ((err == httplib::Error::Read || err == httplib::Error::Canceled) && !r.body.empty() &&
        r.status >= 200 && r.status < 300) {
      r.partial = true;
      return r;
    }
    last_error = httplib::to_string(err);
  }
  throw RetryableError(path + ": giving up after " + std::to_string(policy.max_retries + 1) +
                       " attempts (" + last_error + ")");
}

std::vector<CdxEntry> ArchiveClient::cdx_list(std::string_view url) const {
  if (url.empty()) throw ConfigError("cdx_list: empty url");
  auto r = get(cdx_query_path(url), policy_);
  if (r.partial) throw RetryableError("cdx_list: truncated response for " + std::string(url));
  return parse_cdx_json(r.body, warn_);
}

FetchResult ArchiveClient::fetch_snapshot(const CdxEntry& entry) const {
  return fetch_snapshot(entry, policy_);
}

FetchResult ArchiveClient::fetch_snapshot(const CdxEntry& entry, const FetchPolicy& policy) const {
  return get(snapshot_path(entry), policy);
}

}  // namespace privlens
