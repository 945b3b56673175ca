#include <filesystem>
#include <random>

#include "doctest.h"
#include "privlens/corpus.hpp"
#include "privlens/error.hpp"

using namespace privlens;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Timestamp ts(int y, int m, int d = 1) { return Timestamp{y, m, d, 0, 0, 0}; }

}  // namespace

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("hash ignores whitespace layout only") {
  CHECK(content_hash("We  collect\n data. ") == content_hash("We collect data."));
  CHECK(content_hash("We collect data.") != content_hash("We collect data!"));
  CHECK(content_hash("We collect data.") != content_hash("we collect data."));
}

TEST_CASE("dedupe keeps the earliest first_seen") {
  TempDir dir("privlens_corpus_a");
  CorpusStore store(dir.path);
  auto a = store.dedupe("policy text", ts(2019, 1), "a.com");
  auto b = store.dedupe("policy  text", ts(2019, 5), "a.com");
  CHECK(a.content_hash == b.content_hash);
  CHECK(b.first_seen == ts(2019, 1));
  CHECK(store.uniques().size() == 1);

  auto c = store.dedupe("later first", ts(2020, 6), "b.com");
  auto d = store.dedupe("later first", ts(2020, 2), "b.com");
  CHECK(d.first_seen == ts(2020, 2));
  CHECK(c.content_hash == d.content_hash);

  store.dedupe("policy texts", ts(2019, 1), "a.com");
  CHECK(store.uniques().size() == 3);
}

TEST_CASE("store round trips through disk") {
  TempDir dir("privlens_corpus_b");
  {
    CorpusStore store(dir.path);
    auto u = store.dedupe("We collect your data.", ts(2018, 3, 4), "a.com");
    PolicySnapshot s;
    s.site = "a.com";
    s.link = {"/privacy", "Privacy Policy", "privacy polic", false};
    s.archive_timestamp = Timestamp{2018, 3, 4, 5, 6, 7};
    s.text_ref = u.content_hash;
    s.gate = {"en", true, 120, {0.9}, true};
    store.add_snapshot(s);
    PolicySnapshot failed = s;
    failed.text_ref.reset();
    failed.gate.passed = false;
    failed.partial = true;
    failed.archive_timestamp = Timestamp{2018, 4, 1, 0, 0, 0};
    CHECK(store.add_snapshot(failed));
    CHECK_FALSE(store.add_snapshot(failed));
    CHECK(store.snapshots().size() == 2);
    REQUIRE(store.find_snapshot("a.com", "/privacy", failed.archive_timestamp) != nullptr);
    CHECK(store.find_snapshot("a.com", "/privacy", Timestamp{2019, 1, 1, 0, 0, 0}) == nullptr);
    store.save();
  }
  CHECK(fs::exists(dir.path / "snapshots.jsonl"));
  CHECK(fs::exists(dir.path / "uniques.jsonl"));
  auto hash = content_hash("We collect your data.");
  CHECK(read_file(dir.path / "texts" / (hash + ".txt")) == "We collect your data.");

  std::string line = read_file(dir.path / "snapshots.jsonl");
  for (const char* field : {"\"site\"", "\"link\"", "\"href\"", "\"anchor_text\"",
                            "\"matched_term\"", "\"archive_timestamp\"", "\"text_ref\"",
                            "\"gate\"", "\"language\"", "\"language_confident\"",
                            "\"word_count\"", "\"policy_probabilities\"", "\"passed\""})
    CHECK_MESSAGE(line.find(field) != std::string::npos, field);

  CorpusStore again(dir.path);
  auto snaps = again.snapshots();
  REQUIRE(snaps.size() == 2);
  CHECK(snaps[0].text_ref == hash);
  CHECK(snaps[0].archive_timestamp == Timestamp{2018, 3, 4, 5, 6, 7});
  CHECK(snaps[0].gate.policy_probabilities == std::vector<double>{0.9});
  CHECK_FALSE(snaps[1].text_ref.has_value());
  CHECK(snaps[1].partial);
  auto uniq = again.uniques();
  REQUIRE(uniq.size() == 1);
  CHECK(uniq[0].text == "We collect your data.");
  CHECK(uniq[0].first_seen == ts(2018, 3, 4));
  CHECK(again.text(hash) == std::optional<std::string>("We collect your data."));

  // Saving an unchanged store is byte-identical.
  std::string before = read_file(dir.path / "uniques.jsonl");
  again.save();
  CHECK(read_file(dir.path / "uniques.jsonl") == before);
}

TEST_CASE("unique count never exceeds snapshot count") {
  TempDir dir("privlens_corpus_c");
  CorpusStore store(dir.path);
  std::mt19937 rng(3);
  const char* texts[] = {"a b c", "a  b c", "a b d", "x", " x ", "y"};
  int snapshots = 0;
  for (int i = 0; i < 200; ++i) {
    store.dedupe(texts[rng() % 6], ts(2000 + static_cast<int>(rng() % 20), 1), "s");
    ++snapshots;
    CHECK(static_cast<int>(store.uniques().size()) <= snapshots);
  }
  CHECK(store.uniques().size() == 4);
}

TEST_CASE("corrupt store is reported") {
  TempDir dir("privlens_corpus_d");
  write_file_atomic(dir.path / "snapshots.jsonl", "{not json\n");
  CHECK_THROWS_AS(CorpusStore{dir.path}, StorageError);
}

TEST_CASE("stored text keeps its line structure") {
  CHECK(tidy_policy_text("  Title \n\n\n  We  collect.\nMore.\n\n") == "Title\n\nWe collect.\nMore.");
  CHECK(tidy_policy_text("\n \n") == "");
  TempDir dir("privlens_corpus_tidy");
  CorpusStore store(dir.path);
  auto a = store.dedupe("Title\n\nWe collect data.", ts(2019, 1, 1), "a.com");
  auto b = store.dedupe("Title We   collect data.", ts(2018, 1, 1), "b.com");
  CHECK(a.content_hash == b.content_hash);
  CHECK(b.text == "Title\n\nWe collect data.");
  CHECK(b.first_seen == ts(2018, 1, 1));
}
