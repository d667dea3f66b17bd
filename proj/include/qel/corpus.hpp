#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qel/tokenizer.hpp"

namespace qel {

// Raised for malformed corpus input. `byte_offset` points at the offending
// markup within the line; `line` is 1-based when the error comes from a file.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t byte_offset, long line = -1)
      : std::runtime_error(msg), byte_offset_(byte_offset), line_(line) {}

  std::size_t byte_offset() const { return byte_offset_; }
  long line() const { return line_; }

 private:
  std::size_t byte_offset_;
  long line_;
};

enum class SentenceKind { kRegular, kDisambiguation, kInfobox };

std::string_view kind_name(SentenceKind kind);
SentenceKind parse_kind(std::string_view name);  // throws ParseError

struct Annotation {
  std::string entity;       // target title as written in the markup
  std::string anchor_text;  // surface string as written
  std::size_t begin = 0;    // byte range of the anchor inside `text`
  std::size_t end = 0;
  std::size_t tok_begin = 0;  // token span, [tok_begin, tok_end)
  std::size_t tok_end = 0;
  bool piped = false;  // written as [[entity|anchor]] rather than [[entity]]

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct AnnotatedSentence {
  std::string page_title;
  SentenceKind kind = SentenceKind::kRegular;
  std::string text;  // markup stripped
  std::vector<Annotation> annotations;  // sorted by tok_begin
  std::vector<Token> tokens;            // cached tokenization of `text`

  std::vector<std::string> norm_tokens() const;
};

struct Page {
  std::string title;
  std::vector<AnnotatedSentence> sentences;  // document order
};

struct Corpus {
  std::vector<Page> pages;
  std::size_t sentence_count = 0;
  std::size_t annotation_count = 0;

  void recount();
};

// Parses one `[[Entity|anchor]]` / `[[Entity]]` marked-up sentence.
AnnotatedSentence parse_annotated_sentence(std::string_view page_title,
                                           std::string_view line,
                                           SentenceKind kind = SentenceKind::kRegular);

// Inverse of parsing: re-inserts the markup of all annotations. For a freshly
// parsed sentence this reproduces the input line byte for byte.
std::string reinsert_markup(const AnnotatedSentence& sentence);

// Annotates unannotated occurrences of the page title's surface form
// (parenthetical disambiguator stripped, case-insensitive) in regular
// sentences of the page.
Page augment_title_annotations(Page page);

// Propagates each annotation (a, e) to unannotated occurrences of `a` in
// later regular sentences; when a page maps the same anchor to several
// entities, the most recent prior mapping wins.
Page propagate_first_mention(Page page);

// Loads `page_title \t kind \t sentence` records, groups them into pages and
// applies title augmentation followed by first-mention propagation.
Corpus load_corpus(const std::string& path, std::size_t workers = 1);

}  // namespace qel
