#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "fixture5.hpp"
#include "qel/corpus.hpp"
#include "qel/stats.hpp"
#include "synth.hpp"

using namespace qel;

namespace {

Corpus one_page(const std::vector<std::string>& lines,
                const std::string& title = "P") {
  Corpus c;
  c.pages.push_back(Page{title, {}});
  for (const auto& line : lines)
    c.pages.back().sentences.push_back(parse_annotated_sentence(title, line));
  c.recount();
  return c;
}

}  // namespace

TEST_CASE("worked corpus: anchor and pair counts by hand") {
  LinkStats stats = compute_link_stats(fixture5::corpus());

  CHECK(stats.freq.at("austin") == 7);
  CHECK(stats.link.at("austin") == 3);
  CHECK(stats.freq.at("blake shelton") == 4);
  CHECK(stats.link.at("blake shelton") == 4);
  CHECK(stats.freq.at("austin texas") == 1);
  CHECK(stats.freq.at("austin song") == 1);
  CHECK(stats.freq.at("austin powers") == 1);
  CHECK(stats.freq.size() == 5);
  CHECK(stats.link.size() == 5);

  CHECK(stats.pair_freq.at({"austin", "Austin (song)"}) == 2);
  CHECK(stats.pair_freq.at({"austin", "Austin, Texas"}) == 1);
  CHECK(stats.pair_freq.at({"blake shelton", "Blake Shelton"}) == 4);
  CHECK(stats.pair_freq.at({"austin texas", "Austin, Texas"}) == 1);
  CHECK(stats.pair_freq.at({"austin song", "Austin (song)"}) == 1);
  CHECK(stats.pair_freq.at({"austin powers", "Austin Powers"}) == 1);
  CHECK(stats.pair_freq.size() == 6);

  CHECK(stats.lp("austin") == doctest::Approx(3.0 / 7.0).epsilon(1e-12));
  CHECK(stats.lp("blake shelton") == 1.0);
  CHECK(stats.prior("austin", "Austin (song)") ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(stats.prior("austin", "Austin, Texas") ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(stats.prior("blake shelton", "Blake Shelton") == 1.0);

  CHECK(stats.lp("nonexistent") == 0.0);
  CHECK(stats.prior("nonexistent", "Austin (song)") == 0.0);
  CHECK(stats.prior("austin", "Nonexistent") == 0.0);
}

TEST_CASE("link probability four links out of ten mentions") {
  std::vector<std::string> lines;
  for (int i = 0; i < 4; ++i) lines.push_back("The [[Mesa (city)|mesa]] rises [[here]].");
  for (int i = 0; i < 6; ++i) lines.push_back("The mesa rises [[here]].");
  LinkStats stats = compute_link_stats(one_page(lines));
  CHECK(stats.freq.at("mesa") == 10);
  CHECK(stats.link.at("mesa") == 4);
  CHECK(stats.lp("mesa") == 0.4);
  CHECK(stats.prior("mesa", "Mesa (city)") == 1.0);
}

TEST_CASE("occurrences are counted greedily without overlap") {
  Corpus c = one_page({"[[X|austin austin]] extra", "austin austin austin"});
  // the second sentence carries no annotation but still counts occurrences
  LinkStats stats = compute_link_stats(c);
  CHECK(stats.freq.at("austin austin") == 2);
  CHECK(stats.link.at("austin austin") == 1);
  CHECK(stats.lp("austin austin") == 0.5);
}

TEST_CASE("occurrence scans restart per sentence and span kinds") {
  Corpus c;
  c.pages.push_back(Page{"P", {parse_annotated_sentence("P", "[[ab cd]]")}});
  c.pages.push_back(Page{"Q", {parse_annotated_sentence(
                                  "Q", "ab cd here", SentenceKind::kDisambiguation),
                              parse_annotated_sentence("Q", "ab cd there")}});
  c.recount();
  LinkStats stats = compute_link_stats(c);
  CHECK(stats.freq.at("ab cd") == 3);
  CHECK(stats.link.at("ab cd") == 1);
}

TEST_CASE("anchors that normalize to nothing are dropped") {
  Corpus c = one_page({"[[X|...]] word here"});
  LinkStats stats = compute_link_stats(c);
  CHECK(stats.freq.empty());
  CHECK(stats.link.empty());
  CHECK(stats.pair_freq.empty());
}

TEST_CASE("case and punctuation variants collapse onto one key") {
  Corpus c = one_page({"[[Blake Shelton]] sang.",
                       "[[Blake Shelton|BLAKE, shelton]] again.",
                       "Plain blake shelton closes."});
  LinkStats stats = compute_link_stats(c);
  CHECK(stats.freq.at("blake shelton") == 3);
  CHECK(stats.link.at("blake shelton") == 2);
  CHECK(stats.pair_freq.at({"blake shelton", "Blake Shelton"}) == 2);
}

TEST_CASE("invariants hold on a randomized corpus") {
  synth::Rng rng(99);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  const std::vector<std::string> entities = {"E1", "E2", "E3"};
  std::vector<std::string> lines;
  for (int i = 0; i < 120; ++i) {
    std::string line;
    std::size_t len = 1 + rng.below(10);
    std::size_t t = 0;
    while (t < len) {
      if (t) line += " ";
      std::size_t span = 1 + rng.below(2);
      if (span > len - t) span = len - t;
      std::string surface = vocab[rng.below(vocab.size())];
      for (std::size_t k = 1; k < span; ++k)
        surface += " " + vocab[rng.below(vocab.size())];
      if (rng.below(3) == 0) {
        line += "[[" + entities[rng.below(entities.size())] + "|" + surface + "]]";
        t += span;
      } else {
        line += surface;
        t += span;
      }
    }
    lines.push_back(line);
  }
  LinkStats stats = compute_link_stats(one_page(lines));

  REQUIRE(!stats.link.empty());
  for (const auto& [key, l] : stats.link) {
    REQUIRE(stats.freq.count(key) == 1);
    CHECK(l <= stats.freq.at(key));  // every annotation is also an occurrence
    CHECK(l >= 1);
    double p = stats.lp(key);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);

    // pair counts partition the link count, so priors sum to one
    std::uint64_t pair_sum = 0;
    double prior_sum = 0.0;
    for (const auto& [ae, n] : stats.pair_freq) {
      if (ae.first != key) continue;
      pair_sum += n;
      double prior = stats.prior(key, ae.second);
      CHECK(prior > 0.0);
      CHECK(prior <= 1.0);
      prior_sum += prior;
    }
    CHECK(pair_sum == l);
    CHECK(prior_sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  // freq keys with no link entry cannot exist: patterns come from pass 1
  for (const auto& [key, f] : stats.freq) {
    (void)f;
    CHECK(stats.link.count(key) == 1);
  }
}

TEST_CASE("statistics survive a save/load round trip byte for byte") {
  auto dir = synth::fresh_dir("qel_test_stats");
  std::string prefix = (dir / "stats").string();

  LinkStats stats = compute_link_stats(fixture5::corpus());
  save_link_stats(stats, prefix);
  LinkStats loaded = load_link_stats(prefix);

  CHECK(loaded.freq == stats.freq);
  CHECK(loaded.link == stats.link);
  CHECK(loaded.pair_freq == stats.pair_freq);

  std::string anchors_once = synth::read_file(prefix + ".anchors");
  std::string pairs_once = synth::read_file(prefix + ".pairs");
  save_link_stats(loaded, prefix);
  CHECK(synth::read_file(prefix + ".anchors") == anchors_once);
  CHECK(synth::read_file(prefix + ".pairs") == pairs_once);

  // sorted output, one record per line
  auto lines = synth::lines_of(anchors_once);
  REQUIRE(!lines.empty());
  CHECK(lines.front().substr(0, 6) == "austin");
}

TEST_CASE("stat files with the wrong shape are rejected") {
  auto dir = synth::fresh_dir("qel_test_stats_bad");
  std::string prefix = (dir / "stats").string();

  synth::write_file(prefix + ".anchors", "austin\t7\n");
  synth::write_file(prefix + ".pairs", "");
  CHECK_THROWS_AS(load_link_stats(prefix), ParseError);

  synth::write_file(prefix + ".anchors", "austin\tseven\t3\n");
  CHECK_THROWS_AS(load_link_stats(prefix), std::invalid_argument);

  synth::write_file(prefix + ".anchors", "austin\t7\t3\n");
  synth::write_file(prefix + ".pairs", "austin\tAustin (song)\n");
  CHECK_THROWS_AS(load_link_stats(prefix), ParseError);

  CHECK_THROWS_AS(load_link_stats((dir / "missing").string()), std::runtime_error);
}

TEST_CASE("computation is independent of the worker count") {
  Corpus c = fixture5::corpus();
  LinkStats one = compute_link_stats(c, 1);
  LinkStats four = compute_link_stats(c, 4);
  CHECK(one.freq == four.freq);
  CHECK(one.link == four.link);
  CHECK(one.pair_freq == four.pair_freq);
}
