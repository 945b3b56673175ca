#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privlens/dates.hpp"

namespace privlens {

struct YearInterval {
  int first = 1;
  int last = 0;  // first > last means empty
  bool empty() const { return first > last; }
  bool contains(int year) const { return year >= first && year <= last; }
};

struct SnapshotSchedule {
  YearInterval yearly_range{1996, 2008};
  YearInterval quarterly_range{2009, 2017};
  YearMonth monthly_start{2018, 1};

  // One bucket per month for all time, used for policy snapshots.
  static SnapshotSchedule monthly_only(YearMonth start = {1990, 1});
  // Throws ConfigError on overlapping or out-of-order ranges.
  void validate() const;
};

struct CdxEntry {
  std::string original_url;
  Timestamp archive_timestamp;
  int status_code = 200;
  std::string digest;

  // 200 and redirects are fetched; anything else counts as missing.
  bool fetchable() const { return status_code == 200 || (status_code >= 300 && status_code < 400); }
};

// Bucket key ("Y1999", "Q2010-3", "M2019-04"), or nullopt when the timestamp
// falls before every range.
std::optional<std::string> schedule_bucket(const SnapshotSchedule& schedule, const Timestamp& t);

// Earliest entry per bucket, in input order.
std::vector<CdxEntry> build_schedule(const SnapshotSchedule& schedule,
                                     const std::vector<CdxEntry>& available);

using WarningHandler = std::function<void(const std::string&)>;

// Parses the JSON output of the CDX endpoint: an array of rows, the first of
// which names the columns. Rows that are short, have a bad timestamp or a
// non-numeric status are skipped and reported to `warn`. Sorted by
// timestamp (stable).
std::vector<CdxEntry> parse_cdx_json(std::string_view body, const WarningHandler& warn = {});

struct FetchPolicy {
  double timeout = 120.0;  // seconds
  double min_delay_between_requests = 1.0;
  int max_retries = 3;
  double backoff_base = 1.0;  // first retry waits this long, then doubles

  void validate() const;
};

struct FetchResult {
  std::string body;
  bool partial = false;
  int status = 0;
};

// Serializes requests per host and spaces their start times by at least the
// configured delay. Shared by every client in the process unless replaced.
class HostThrottle {
 public:
  using Clock = std::chrono::steady_clock;

  // Blocks until `host` is free and min_delay has elapsed since the last
  // request to it started, then runs `request` while holding the host.
  void run(const std::string& host, double min_delay, const std::function<void()>& request);

  static std::shared_ptr<HostThrottle> shared();

 private:
  struct Slot {
    std::mutex busy;
    std::optional<Clock::time_point> last_start;
  };
  std::mutex mu_;
  std::map<std::string, std::unique_ptr<Slot>> slots_;
};

std::string percent_encode(std::string_view s);

// Drops the "/web/<timestamp><flags>/" prefix archive pages put on links.
std::string strip_archive_prefix(std::string_view href);
// Absolute URL of `href` found on the page at `page_url` (archive prefix
// stripped first). page_url without a scheme is taken as http.
std::string resolve_href(std::string_view page_url, std::string_view href);

class ArchiveClient {
 public:
  explicit ArchiveClient(std::string base_url = "http://web.archive.org", FetchPolicy policy = {},
                         std::shared_ptr<HostThrottle> throttle = HostThrottle::shared());

  std::string cdx_query_path(std::string_view url) const;
  std::string snapshot_path(const CdxEntry& entry) const;

  // Throws RetryableError after exhausting retries, PermanentMissingError
  // on 404/410.
  std::vector<CdxEntry> cdx_list(std::string_view url) const;
  FetchResult fetch_snapshot(const CdxEntry& entry) const;
  FetchResult fetch_snapshot(const CdxEntry& entry, const FetchPolicy& policy) const;

  // GET of an arbitrary path on the archive host, with the same retry and
  // timeout rules.
  FetchResult get(const std::string& path, const FetchPolicy& policy) const;

  void set_warning_handler(WarningHandler h) { warn_ = std::move(h); }
  const FetchPolicy& policy() const { return policy_; }
  const std::string& base_url() const { return base_; }

 private:
  std::string base_;
  FetchPolicy policy_;
  std::shared_ptr<HostThrottle> throttle_;
  WarningHandler warn_;
};

}  // namespace privlens
