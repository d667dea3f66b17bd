#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "fixture5.hpp"
#include "qel/corpus.hpp"
#include "synth.hpp"

using namespace qel;

TEST_CASE("sentence kinds round-trip and reject junk") {
  CHECK(kind_name(SentenceKind::kRegular) == "regular");
  CHECK(kind_name(SentenceKind::kDisambiguation) == "disambiguation");
  CHECK(kind_name(SentenceKind::kInfobox) == "infobox");
  CHECK(parse_kind("regular") == SentenceKind::kRegular);
  CHECK(parse_kind("disambiguation") == SentenceKind::kDisambiguation);
  CHECK(parse_kind("infobox") == SentenceKind::kInfobox);
  CHECK_THROWS_AS(parse_kind("Regular"), ParseError);
  CHECK_THROWS_AS(parse_kind(""), ParseError);
}

TEST_CASE("parsing a piped and an unpiped annotation") {
  auto line = fixture5::sentence_lines()[0];
  auto s = parse_annotated_sentence("Austin (song)", line);

  CHECK(s.page_title == "Austin (song)");
  CHECK(s.kind == SentenceKind::kRegular);
  CHECK(s.text ==
        "Austin is a song written by David Kent and Kirsti Manna, and "
        "performed by American country music artist Blake Shelton.");
  REQUIRE(s.annotations.size() == 2);
  REQUIRE(s.tokens.size() == 20);

  const Annotation& a0 = s.annotations[0];
  CHECK(a0.entity == "Austin (song)");
  CHECK(a0.anchor_text == "Austin");
  CHECK(a0.piped);
  CHECK(a0.tok_begin == 0);
  CHECK(a0.tok_end == 1);

  const Annotation& a1 = s.annotations[1];
  CHECK(a1.entity == "Blake Shelton");
  CHECK(a1.anchor_text == "Blake Shelton");
  CHECK_FALSE(a1.piped);
  CHECK(a1.tok_begin == 18);
  CHECK(a1.tok_end == 20);

  for (const auto& a : s.annotations) {
    CHECK(s.text.substr(a.begin, a.end - a.begin) == a.anchor_text);
  }
  CHECK(s.norm_tokens()[0] == "austin");
  CHECK(s.norm_tokens()[19] == "shelton");
}

TEST_CASE("markup reinsertion inverts parsing on the worked corpus") {
  for (const auto& line : fixture5::sentence_lines()) {
    auto s = parse_annotated_sentence("Some Page", line);
    CHECK(reinsert_markup(s) == line);
  }
}

TEST_CASE("markup reinsertion inverts parsing on random sentences") {
  synth::Rng rng(7);
  const std::vector<std::string> vocab = {"Austin", "song",  "Blake", "river",
                                          "deep",   "Texas", "blues", "hill"};
  for (int iter = 0; iter < 300; ++iter) {
    std::size_t n = 1 + rng.below(12);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) words.push_back(vocab[rng.below(vocab.size())]);

    std::string line;
    std::size_t i = 0;
    while (i < n) {
      if (i) line += rng.below(4) == 0 ? ", " : " ";
      std::size_t span = 1 + rng.below(3);
      if (span > n - i) span = n - i;
      bool annotate = rng.below(3) == 0;
      std::string surface;
      for (std::size_t k = 0; k < span; ++k) {
        if (k) surface += " ";
        surface += words[i + k];
      }
      if (annotate) {
        if (rng.below(2) == 0) {
          line += "[[" + surface + "]]";
        } else {
          line += "[[Entity " + std::to_string(rng.below(5)) + "|" + surface + "]]";
        }
        i += span;
      } else {
        line += words[i];
        i += 1;
      }
    }
    if (rng.below(2) == 0) line += ".";

    auto s = parse_annotated_sentence("Page", line);
    CHECK(reinsert_markup(s) == line);
    for (const auto& a : s.annotations) {
      CHECK(s.text.substr(a.begin, a.end - a.begin) == a.anchor_text);
      std::vector<std::string> covered;
      for (std::size_t t = a.tok_begin; t < a.tok_end; ++t)
        covered.push_back(s.tokens[t].norm);
      CHECK(covered == normalized_tokens(a.anchor_text));
    }
  }
}

TEST_CASE("malformed markup is rejected with a byte offset") {
  auto offset_of = [](const std::string& line) -> long {
    try {
      parse_annotated_sentence("P", line);
    } catch (const ParseError& e) {
      return static_cast<long>(e.byte_offset());
    }
    return -1;
  };
  CHECK(offset_of("ab [[x") == 3);
  CHECK(offset_of("a [[x [[y]] z]]") == 6);
  CHECK(offset_of("a ]] b") == 2);
  CHECK(offset_of("[[|anchor]] x") == 0);
  CHECK(offset_of("[[Entity|]] x") == 0);
  CHECK(offset_of("x [[ |a]]") == 2);  // entity normalizes to empty
  // the annotation stops in the middle of the word "anchor"
  CHECK_THROWS_WITH_AS(parse_annotated_sentence("P", "an[[X|ch]]or"),
                       "annotation boundary splits a token", ParseError);
  CHECK(offset_of("an[[X|ch]]or") == 2);
}

TEST_CASE("title augmentation annotates free title mentions") {
  Page page;
  page.title = "Austin (song)";
  page.sentences.push_back(
      parse_annotated_sentence(page.title, "Austin is a song."));
  page.sentences.push_back(parse_annotated_sentence(
      page.title, "[[Austin (song)|Austin]] rocks. Austin indeed."));
  page.sentences.push_back(parse_annotated_sentence(
      page.title, "Austin may refer to:", SentenceKind::kDisambiguation));

  Page out = augment_title_annotations(page);

  REQUIRE(out.sentences[0].annotations.size() == 1);
  const Annotation& a = out.sentences[0].annotations[0];
  CHECK(a.entity == "Austin (song)");
  CHECK(a.anchor_text == "Austin");
  CHECK(a.piped);  // surface differs from the title
  CHECK(a.tok_begin == 0);
  CHECK(a.tok_end == 1);

  // only the unannotated second mention gains an annotation
  REQUIRE(out.sentences[1].annotations.size() == 2);
  CHECK(out.sentences[1].annotations[1].tok_begin == 2);
  CHECK(out.sentences[1].annotations[1].entity == "Austin (song)");

  // non-regular sentences are left alone
  CHECK(out.sentences[2].annotations.empty());
}

TEST_CASE("title augmentation matches case-insensitively and whole spans") {
  Page page;
  page.title = "Blake Shelton";
  page.sentences.push_back(parse_annotated_sentence(
      page.title, "blake shelton sang. Meanwhile Blake Shelton toured."));
  page.sentences.push_back(
      parse_annotated_sentence(page.title, "[[X|Blake]] Shelton appeared."));

  Page out = augment_title_annotations(page);

  REQUIRE(out.sentences[0].annotations.size() == 2);
  CHECK(out.sentences[0].annotations[0].anchor_text == "blake shelton");
  CHECK(out.sentences[0].annotations[0].piped);
  CHECK(out.sentences[0].annotations[1].anchor_text == "Blake Shelton");
  CHECK_FALSE(out.sentences[0].annotations[1].piped);

  // "Blake" is already claimed by another annotation, so the span is blocked
  REQUIRE(out.sentences[1].annotations.size() == 1);
  CHECK(out.sentences[1].annotations[0].entity == "X");
}

TEST_CASE("title augmentation is idempotent and only adds") {
  Page page;
  page.title = "Austin (song)";
  page.sentences.push_back(parse_annotated_sentence(
      page.title, "Austin is a song. Austin charted in Austin."));
  Page once = augment_title_annotations(page);
  Page twice = augment_title_annotations(once);
  REQUIRE(once.sentences[0].annotations.size() == 3);
  CHECK(once.sentences[0].annotations.size() >= page.sentences[0].annotations.size());
  REQUIRE(twice.sentences[0].annotations.size() == once.sentences[0].annotations.size());
  CHECK(reinsert_markup(twice.sentences[0]) == reinsert_markup(once.sentences[0]));
}

TEST_CASE("first-mention propagation reuses earlier anchors") {
  Page page;
  page.title = "Austin, Texas";
  page.sentences.push_back(parse_annotated_sentence(
      page.title, "[[Austin, Texas|Austin]] is the capital."));
  page.sentences.push_back(
      parse_annotated_sentence(page.title, "Austin has hills."));

  Page out = propagate_first_mention(page);

  REQUIRE(out.sentences[1].annotations.size() == 1);
  const Annotation& a = out.sentences[1].annotations[0];
  CHECK(a.entity == "Austin, Texas");
  CHECK(a.anchor_text == "Austin");
  CHECK(a.piped);
}

TEST_CASE("propagation never applies to the introducing sentence") {
  Page page;
  page.title = "Austin (song)";
  page.sentences.push_back(parse_annotated_sentence(
      page.title, "[[Austin (song)|Austin]] loves Austin."));
  Page out = propagate_first_mention(page);
  CHECK(out.sentences[0].annotations.size() == 1);
}

TEST_CASE("the most recent mapping for an anchor wins") {
  Page page;
  page.title = "P";
  page.sentences.push_back(
      parse_annotated_sentence(page.title, "[[Austin, Texas|Austin]] is hot."));
  page.sentences.push_back(
      parse_annotated_sentence(page.title, "[[Austin (song)|Austin]] is a song."));
  page.sentences.push_back(parse_annotated_sentence(page.title, "Austin charted."));

  Page out = propagate_first_mention(page);

  REQUIRE(out.sentences[2].annotations.size() == 1);
  CHECK(out.sentences[2].annotations[0].entity == "Austin (song)");
}

TEST_CASE("propagation prefers the longest known anchor") {
  Page page;
  page.title = "P";
  page.sentences.push_back(parse_annotated_sentence(
      page.title, "[[New York City|New York]] contains [[York]]."));
  page.sentences.push_back(parse_annotated_sentence(page.title, "New York wins."));

  Page out = propagate_first_mention(page);

  REQUIRE(out.sentences[1].annotations.size() == 1);
  CHECK(out.sentences[1].annotations[0].entity == "New York City");
  CHECK(out.sentences[1].annotations[0].anchor_text == "New York");
}

TEST_CASE("propagation skips non-regular sentences entirely") {
  Page page;
  page.title = "P";
  page.sentences.push_back(
      parse_annotated_sentence(page.title, "[[Austin, Texas|Austin]] is hot."));
  page.sentences.push_back(parse_annotated_sentence(
      page.title, "Austin may refer to:", SentenceKind::kDisambiguation));
  Page out = propagate_first_mention(page);
  CHECK(out.sentences[1].annotations.empty());
}

TEST_CASE("loading the worked corpus file") {
  auto dir = synth::fresh_dir("qel_test_corpus");
  auto path = (dir / "corpus.tsv").string();
  synth::write_file(path, fixture5::corpus_file_text());

  Corpus c = load_corpus(path);

  REQUIRE(c.pages.size() == 4);
  CHECK(c.pages[0].title == "Austin (song)");
  CHECK(c.pages[1].title == "Blake Shelton");
  CHECK(c.pages[2].title == "Austin (disambiguation)");
  CHECK(c.pages[3].title == "Austin, Texas");
  CHECK(c.pages[0].sentences.size() == 2);
  CHECK(c.sentence_count == 5);
  CHECK(c.annotation_count == 10);
  CHECK(c.pages[2].sentences[0].kind == SentenceKind::kDisambiguation);

  // augmentation and propagation are no-ops here, so markup round-trips
  auto lines = fixture5::sentence_lines();
  CHECK(reinsert_markup(c.pages[0].sentences[0]) == lines[0]);
  CHECK(reinsert_markup(c.pages[0].sentences[1]) == lines[1]);
  CHECK(reinsert_markup(c.pages[1].sentences[0]) == lines[2]);
  CHECK(reinsert_markup(c.pages[2].sentences[0]) == lines[3]);
  CHECK(reinsert_markup(c.pages[3].sentences[0]) == lines[4]);
}

TEST_CASE("loading applies augmentation then propagation") {
  auto dir = synth::fresh_dir("qel_test_corpus_aug");
  auto path = (dir / "corpus.tsv").string();
  synth::write_file(path,
                    "Austin (song)\tregular\t[[Austin (song)|Austin]] is a "
                    "[[song]].\n"
                    "Austin (song)\tregular\tThe song Austin charted.\n");

  Corpus c = load_corpus(path);

  REQUIRE(c.pages.size() == 1);
  const auto& s1 = c.pages[0].sentences[1];
  REQUIRE(s1.annotations.size() == 2);
  CHECK(s1.annotations[0].anchor_text == "song");
  CHECK(s1.annotations[0].entity == "song");
  CHECK(s1.annotations[1].anchor_text == "Austin");
  CHECK(s1.annotations[1].entity == "Austin (song)");
}

TEST_CASE("interleaved page records group by title") {
  auto dir = synth::fresh_dir("qel_test_corpus_interleave");
  auto path = (dir / "corpus.tsv").string();
  synth::write_file(path,
                    "A\tregular\tOne [[x]].\n"
                    "B\tregular\tTwo [[y]].\n"
                    "A\tregular\tThree [[z]].\n");
  Corpus c = load_corpus(path);
  REQUIRE(c.pages.size() == 2);
  CHECK(c.pages[0].title == "A");
  CHECK(c.pages[0].sentences.size() == 2);
  CHECK(c.pages[1].sentences.size() == 1);
}

TEST_CASE("corpus errors carry the file and line") {
  auto dir = synth::fresh_dir("qel_test_corpus_err");
  auto check_error = [&](const std::string& name, const std::string& body,
                         const std::string& fragment, long line) {
    auto path = (dir / name).string();
    synth::write_file(path, body);
    try {
      load_corpus(path);
      FAIL("expected ParseError for " << name);
    } catch (const ParseError& e) {
      std::string msg = e.what();
      CHECK(msg.find(path) != std::string::npos);
      CHECK(msg.find(":" + std::to_string(line) + ":") != std::string::npos);
      CHECK(msg.find(fragment) != std::string::npos);
      CHECK(e.line() == line);
    }
  };
  check_error("fields.tsv", "A\tregular\n", "expected 3 tab-separated fields", 1);
  check_error("kind.tsv", "A\tregular\tok [[x]].\nA\tsideways\tnope.\n",
              "unknown sentence kind", 2);
  check_error("markup.tsv", "\n# comment\nA\tregular\tbad [[x\n",
              "'[[' without matching ']]'", 3);
  check_error("title.tsv", " \tregular\tx.\n", "empty page title", 1);
}

TEST_CASE("comments and blank lines are skipped, empty files load") {
  auto dir = synth::fresh_dir("qel_test_corpus_blank");
  auto path = (dir / "corpus.tsv").string();
  synth::write_file(path, "# header\n\nA\tregular\tOnly [[x]].\n\n");
  Corpus c = load_corpus(path);
  CHECK(c.sentence_count == 1);

  auto empty_path = (dir / "empty.tsv").string();
  synth::write_file(empty_path, "");
  Corpus e = load_corpus(empty_path);
  CHECK(e.pages.empty());
  CHECK(e.sentence_count == 0);

  CHECK_THROWS_AS(load_corpus((dir / "missing.tsv").string()), std::runtime_error);
}
