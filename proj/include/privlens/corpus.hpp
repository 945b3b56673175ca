#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privlens/dates.hpp"
#include "privlens/extraction.hpp"

namespace privlens {

struct PolicySnapshot {
  std::string site;
  PolicyLink link;
  Timestamp archive_timestamp;
  std::optional<std::string> text_ref;  // set iff gate.passed
  GateVerdict gate;
  bool partial = false;  // body cut short by the fetch timeout
};

struct UniquePolicyText {
  std::string content_hash;
  std::string text;
  Timestamp first_seen;
  std::string site;
};

// Whitespace runs collapsed to one space, ends trimmed.
std::string normalize_policy_text(std::string_view text);
// Line structure kept: each line whitespace-collapsed, blank-line runs
// reduced to one, ends trimmed. This is the form stored under texts/.
std::string tidy_policy_text(std::string_view text);
// Lowercase hex SHA-256 of the normalized text.
std::string content_hash(std::string_view text);
std::string sha256_hex(std::string_view bytes);

// Writes via a sibling temp file and rename so readers never see a torn file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// On-disk layout under `root`:
//   texts/<hash>.txt   tidied text; the hash is over the normalized form
//   snapshots.jsonl    one PolicySnapshot per line, by site then timestamp
//   uniques.jsonl      one UniquePolicyText (without text) per line, sorted by hash
// Mutations are serialized by an internal mutex. Nothing reaches disk until
// save().
class CorpusStore {
 public:
  // Loads existing snapshots and uniques if present.
  explicit CorpusStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  UniquePolicyText dedupe(std::string_view text, const Timestamp& timestamp, std::string_view site);
  // A snapshot with the same site, href and timestamp is replaced; returns
  // false in that case.
  bool add_snapshot(PolicySnapshot snapshot);
  // Pointer stays valid until the next add_snapshot.
  const PolicySnapshot* find_snapshot(std::string_view site, std::string_view href,
                                      const Timestamp& t) const;

  std::vector<PolicySnapshot> snapshots() const;
  std::vector<UniquePolicyText> uniques() const;  // sorted by hash, text loaded
  std::optional<std::string> text(std::string_view hash) const;

  void save() const;

 private:
  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::vector<PolicySnapshot> snapshots_;
  std::map<std::string, UniquePolicyText> uniques_;
};

}  // namespace privlens
