#include "privlens/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <tuple>

#include "privlens/error.hpp"
#include "privlens/tokenize.hpp"

namespace privlens {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json to_json(const PolicySnapshot& s) {
  ordered_json j;
  j["site"] = s.site;
  j["link"] = {{"href", s.link.href},
               {"anchor_text", s.link.anchor_text},
               {"matched_term", s.link.matched_term}};
  j["archive_timestamp"] = s.archive_timestamp.to_iso();
  j["text_ref"] = s.text_ref ? ordered_json(*s.text_ref) : ordered_json(nullptr);
  j["gate"] = {{"language", s.gate.language},
               {"language_confident", s.gate.language_confident},
               {"word_count", s.gate.word_count},
               {"policy_probabilities", s.gate.policy_probabilities},
               {"passed", s.gate.passed}};
  j["partial"] = s.partial;
  return j;
}

Timestamp parse_ts(const std::string& s) {
  auto t = Timestamp::parse_iso(s);
  if (!t) throw StorageError("bad timestamp in corpus store: " + s);
  return *t;
}

PolicySnapshot snapshot_from_json(const ordered_json& j) {
  PolicySnapshot s;
  s.site = j.at("site").get<std::string>();
  const auto& l = j.at("link");
  s.link.href = l.at("href").get<std::string>();
  s.link.anchor_text = l.at("anchor_text").get<std::string>();
  s.link.matched_term = l.at("matched_term").get<std::string>();
  s.link.is_pdf = is_pdf_href(s.link.href);
  s.archive_timestamp = parse_ts(j.at("archive_timestamp").get<std::string>());
  if (!j.at("text_ref").is_null()) s.text_ref = j.at("text_ref").get<std::string>();
  const auto& g = j.at("gate");
  s.gate.language = g.at("language").get<std::string>();
  s.gate.language_confident = g.at("language_confident").get<bool>();
  s.gate.word_count = g.at("word_count").get<std::size_t>();
  s.gate.policy_probabilities = g.at("policy_probabilities").get<std::vector<double>>();
  s.gate.passed = g.at("passed").get<bool>();
  s.partial = j.value("partial", false);
  return s;
}

template <class F>
void read_jsonl(const fs::path& path, F&& f) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (collapse_whitespace(line).empty()) continue;
    try {
      f(ordered_json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw StorageError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace

std::string normalize_policy_text(std::string_view text) { return collapse_whitespace(text); }

std::string tidy_policy_text(std::string_view text) {
  std::string out;
  bool pending_blank = false;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line = collapse_whitespace(text.substr(start, end - start));
    if (line.empty()) {
      pending_blank = !out.empty();
    } else {
      if (!out.empty()) out += pending_blank ? "\n\n" : "\n";
      out += line;
      pending_blank = false;
    }
    start = end + 1;
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw StorageError("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

std::string content_hash(std::string_view text) { return sha256_hex(normalize_policy_text(text)); }

void write_file_atomic(const fs::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rng() % 1000000007ULL);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw StorageError("short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw StorageError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CorpusStore::CorpusStore(fs::path root) : root_(std::move(root)) {
  read_jsonl(root_ / "snapshots.jsonl",
             [&](const ordered_json& j) { snapshots_.push_back(snapshot_from_json(j)); });
  read_jsonl(root_ / "uniques.jsonl", [&](const ordered_json& j) {
    UniquePolicyText u;
    u.content_hash = j.at("content_hash").get<std::string>();
    u.first_seen = parse_ts(j.at("first_seen").get<std::string>());
    u.site = j.at("site").get<std::string>();
    u.text = read_file(root_ / "texts" / (u.content_hash + ".txt"));
    uniques_.emplace(u.content_hash, std::move(u));
  });
}

UniquePolicyText CorpusStore::dedupe(std::string_view text, const Timestamp& timestamp,
                                     std::string_view site) {
  std::string hash = content_hash(text);
  std::lock_guard lock(mu_);
  auto it = uniques_.find(hash);
  if (it == uniques_.end()) {
    it = uniques_.emplace(hash, UniquePolicyText{hash, tidy_policy_text(text), timestamp, std::string(site)})
             .first;
  } else if (timestamp < it->second.first_seen) {
    it->second.first_seen = timestamp;
    it->second.site = std::string(site);
  }
  return it->second;
}

bool CorpusStore::add_snapshot(PolicySnapshot snapshot) {
  std::lock_guard lock(mu_);
  for (auto& s : snapshots_) {
    if (s.site == snapshot.site && s.link.href == snapshot.link.href &&
        s.archive_timestamp == snapshot.archive_timestamp) {
      s = std::move(snapshot);
      return false;
    }
  }
  snapshots_.push_back(std::move(snapshot));
  return true;
}

const PolicySnapshot* CorpusStore::find_snapshot(std::string_view site, std::string_view href,
                                                 const Timestamp& t) const {
  std::lock_guard lock(mu_);
  for (const auto& s : snapshots_)
    if (s.site == site && s.link.href == href && s.archive_timestamp == t) return &s;
  return nullptr;
}

std::vector<PolicySnapshot> CorpusStore::snapshots() const {
  std::lock_guard lock(mu_);
  return snapshots_;
}

std::vector<UniquePolicyText> CorpusStore::uniques() const {
  std::lock_guard lock(mu_);
  std::vector<UniquePolicyText> out;
  out.reserve(uniques_.size());
  for (const auto& [h, u] : uniques_) out.push_back(u);
  return out;
}

std::optional<std::string> CorpusStore::text(std::string_view hash) const {
  std::lock_guard lock(mu_);
  auto it = uniques_.find(std::string(hash));
  if (it == uniques_.end()) return std::nullopt;
  return it->second.text;
}

void CorpusStore::save() const {
  std::lock_guard lock(mu_);
  fs::create_directories(root_ / "texts");
  std::vector<const PolicySnapshot*> order;
  for (const auto& s : snapshots_) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(), [](const PolicySnapshot* a, const PolicySnapshot* b) {
    return std::tie(a->site, a->archive_timestamp, a->link.href) <
           std::tie(b->site, b->archive_timestamp, b->link.href);
  });
  std::string snaps;
  for (const auto* s : order) snaps += to_json(*s).dump() + "\n";
  std::string uniq;
  for (const auto& [h, u] : uniques_) {
    fs::path tp = root_ / "texts" / (h + ".txt");
    if (!fs::exists(tp)) write_file_atomic(tp, u.text);
    ordered_json j;
    j["content_hash"] = h;
    j["first_seen"] = u.first_seen.to_iso();
    j["site"] = u.site;
    uniq += j.dump() + "\n";
  }
  write_file_atomic(root_ / "snapshots.jsonl", snaps);
  write_file_atomic(root_ / "uniques.jsonl", uniq);
}

}  // namespace privlens
