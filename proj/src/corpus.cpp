#include "qel/corpus.hpp"

#include <algorithm>
#include <map>

#include "util.hpp"

namespace qel {

std::string_view kind_name(SentenceKind kind) {
  switch (kind) {
    case SentenceKind::kRegular: return "regular";
    case SentenceKind::kDisambiguation: return "disambiguation";
    case SentenceKind::kInfobox: return "infobox";
  }
  return "regular";
}

SentenceKind parse_kind(std::string_view name) {
  if (name == "regular") return SentenceKind::kRegular;
  if (name == "disambiguation") return SentenceKind::kDisambiguation;
  if (name == "infobox") return SentenceKind::kInfobox;
  throw ParseError("unknown sentence kind: " + std::string(name), 0);
}

std::vector<std::string> AnnotatedSentence::norm_tokens() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.norm);
  return out;
}

void Corpus::recount() {
  sentence_count = 0;
  annotation_count = 0;
  for (const auto& page : pages) {
    sentence_count += page.sentences.size();
    for (const auto& s : page.sentences) annotation_count += s.annotations.size();
  }
}

namespace {

// Resolves the token span of an annotation covering stripped-text bytes
// [begin, end). Tokens that intersect the range must lie fully inside it,
// otherwise the markup cuts through a word.
void resolve_token_span(const std::vector<Token>& tokens, Annotation& ann,
                        std::size_t markup_offset) {
  std::size_t tb = 0;
  while (tb < tokens.size() && tokens[tb].end <= ann.begin) ++tb;
  std::size_t te = tb;
  while (te < tokens.size() && tokens[te].begin < ann.end) ++te;
  if (tb < te) {
    if (tokens[tb].begin < ann.begin || tokens[te - 1].end > ann.end) {
      throw ParseError("annotation boundary splits a token", markup_offset);
    }
  }
  ann.tok_begin = tb;
  ann.tok_end = te;
}

}  // namespace

AnnotatedSentence parse_annotated_sentence(std::string_view page_title,
                                           std::string_view line,
                                           SentenceKind kind) {
  AnnotatedSentence out;
  out.page_title = normalize_title(page_title);
  out.kind = kind;

  std::vector<std::size_t> markup_offsets;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line.compare(i, 2, "[[") == 0) {
      std::size_t close = line.find("]]", i + 2);
      if (close == std::string_view::npos)
        throw ParseError("'[[' without matching ']]'", i);
      std::size_t nested = line.find("[[", i + 2);
      if (nested != std::string_view::npos && nested < close)
        throw ParseError("nested '[['", nested);
      std::string_view inner = line.substr(i + 2, close - (i + 2));
      std::size_t pipe = inner.find('|');
      Annotation ann;
      ann.piped = pipe != std::string_view::npos;
      std::string_view entity = ann.piped ? inner.substr(0, pipe) : inner;
      std::string_view anchor = ann.piped ? inner.substr(pipe + 1) : inner;
      if (normalize_title(entity).empty())
        throw ParseError("empty entity in annotation", i);
      if (anchor.empty()) throw ParseError("empty anchor in annotation", i);
      ann.entity = std::string(entity);
      ann.anchor_text = std::string(anchor);
      ann.begin = out.text.size();
      out.text.append(anchor);
      ann.end = out.text.size();
      markup_offsets.push_back(i);
      out.annotations.push_back(std::move(ann));
      i = close + 2;
    } else if (line.compare(i, 2, "]]") == 0) {
      throw ParseError("']]' without matching '[['", i);
    } else {
      out.text.push_back(line[i]);
      ++i;
    }
  }

  out.tokens = tokenize(out.text);
  for (std::size_t a = 0; a < out.annotations.size(); ++a) {
    resolve_token_span(out.tokens, out.annotations[a], markup_offsets[a]);
    const Annotation& ann = out.annotations[a];
    // Context-free tokenization guarantees this once containment holds.
    std::vector<std::string> covered;
    for (std::size_t t = ann.tok_begin; t < ann.tok_end; ++t)
      covered.push_back(out.tokens[t].norm);
    if (covered != normalized_tokens(ann.anchor_text))
      throw ParseError("anchor tokens disagree with covered tokens",
                       markup_offsets[a]);
  }
  return out;
}

std::string reinsert_markup(const AnnotatedSentence& sentence) {
  std::vector<const Annotation*> anns;
  anns.reserve(sentence.annotations.size());
  for (const auto& a : sentence.annotations) anns.push_back(&a);
  std::sort(anns.begin(), anns.end(),
            [](const Annotation* a, const Annotation* b) { return a->begin < b->begin; });
  std::string out;
  std::size_t pos = 0;
  for (const Annotation* a : anns) {
    out.append(sentence.text, pos, a->begin - pos);
    out += "[[";
    if (a->piped) {
      out += a->entity;
      out += '|';
    }
    out.append(sentence.text, a->begin, a->end - a->begin);
    out += "]]";
    pos = a->end;
  }
  out.append(sentence.text, pos, sentence.text.size() - pos);
  return out;
}

namespace {

std::vector<bool> occupied_tokens(const AnnotatedSentence& s) {
  std::vector<bool> occ(s.tokens.size(), false);
  for (const auto& a : s.annotations)
    for (std::size_t t = a.tok_begin; t < a.tok_end; ++t) occ[t] = true;
  return occ;
}

bool span_free(const std::vector<bool>& occ, std::size_t b, std::size_t e) {
  for (std::size_t t = b; t < e; ++t)
    if (occ[t]) return false;
  return true;
}

bool tokens_match(const AnnotatedSentence& s, std::size_t at,
                  const std::vector<std::string>& seq) {
  if (at + seq.size() > s.tokens.size()) return false;
  for (std::size_t k = 0; k < seq.size(); ++k)
    if (s.tokens[at + k].norm != seq[k]) return false;
  return true;
}

Annotation make_span_annotation(const AnnotatedSentence& s, std::size_t tb,
                                std::size_t te, const std::string& entity) {
  Annotation ann;
  ann.entity = entity;
  ann.begin = s.tokens[tb].begin;
  ann.end = s.tokens[te - 1].end;
  ann.anchor_text = s.text.substr(ann.begin, ann.end - ann.begin);
  ann.tok_begin = tb;
  ann.tok_end = te;
  ann.piped = ann.anchor_text != entity;
  return ann;
}

void insert_sorted(AnnotatedSentence& s, std::vector<Annotation> fresh) {
  if (fresh.empty()) return;
  for (auto& a : fresh) s.annotations.push_back(std::move(a));
  std::sort(s.annotations.begin(), s.annotations.end(),
            [](const Annotation& a, const Annotation& b) {
              return a.tok_begin < b.tok_begin;
            });
}

}  // namespace

Page augment_title_annotations(Page page) {
  const std::string title = normalize_title(page.title);
  const std::vector<std::string> title_toks =
      normalized_tokens(strip_parenthetical(title));
  if (title_toks.empty()) return page;

  for (auto& s : page.sentences) {
    if (s.kind != SentenceKind::kRegular) continue;
    auto occ = occupied_tokens(s);
    std::vector<Annotation> fresh;
    std::size_t i = 0;
    while (i + title_toks.size() <= s.tokens.size()) {
      if (tokens_match(s, i, title_toks) &&
          span_free(occ, i, i + title_toks.size())) {
        fresh.push_back(make_span_annotation(s, i, i + title_toks.size(), title));
        for (std::size_t t = i; t < i + title_toks.size(); ++t) occ[t] = true;
        i += title_toks.size();
      } else {
        ++i;
      }
    }
    insert_sorted(s, std::move(fresh));
  }
  return page;
}

Page propagate_first_mention(Page page) {
  // Anchor key -> (token sequence, entity). Later sentences override earlier
  // mappings for the same key.
  std::map<std::string, std::pair<std::vector<std::string>, std::string>> known;

  for (auto& s : page.sentences) {
    if (s.kind != SentenceKind::kRegular) continue;

    if (!known.empty()) {
      auto occ = occupied_tokens(s);
      std::vector<Annotation> fresh;
      // Longest sequence known to the page, tried first at each position.
      std::size_t max_len = 0;
      for (const auto& [key, val] : known)
        max_len = std::max(max_len, val.first.size());
      std::size_t i = 0;
      while (i < s.tokens.size()) {
        bool matched = false;
        std::size_t cap = std::min(max_len, s.tokens.size() - i);
        for (std::size_t len = cap; len >= 1; --len) {
          std::vector<std::string> probe;
          probe.reserve(len);
          for (std::size_t k = 0; k < len; ++k) probe.push_back(s.tokens[i + k].norm);
          auto it = known.find(join_tokens(probe));
          if (it != known.end() && span_free(occ, i, i + len)) {
            fresh.push_back(make_span_annotation(s, i, i + len, it->second.second));
            for (std::size_t t = i; t < i + len; ++t) occ[t] = true;
            i += len;
            matched = true;
            break;
          }
        }
        if (!matched) ++i;
      }
      insert_sorted(s, std::move(fresh));
    }

    // Fold this sentence's annotations in afterwards: mappings never apply
    // to the sentence that introduces them.
    for (const auto& a : s.annotations) {
      std::vector<std::string> toks = normalized_tokens(a.anchor_text);
      if (toks.empty()) continue;
      std::string key = join_tokens(toks);
      known[key] = {std::move(toks), normalize_title(a.entity)};
    }
  }
  return page;
}

Corpus load_corpus(const std::string& path, std::size_t workers) {
  std::string data = detail::read_file(path);
  std::vector<std::string> lines = detail::split_lines(data);

  Corpus corpus;
  std::map<std::string, std::size_t> page_of;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_fields(line, '\t');
    long line_no = static_cast<long>(n + 1);
    std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (fields.size() != 3)
      throw ParseError(where + "expected 3 tab-separated fields", 0, line_no);
    std::string title = normalize_title(fields[0]);
    if (title.empty()) throw ParseError(where + "empty page title", 0, line_no);
    SentenceKind kind;
    try {
      kind = parse_kind(fields[1]);
    } catch (const ParseError& e) {
      throw ParseError(where + e.what(), e.byte_offset(), line_no);
    }
    AnnotatedSentence sentence;
    try {
      sentence = parse_annotated_sentence(title, fields[2], kind);
    } catch (const ParseError& e) {
      throw ParseError(where + e.what(), e.byte_offset(), line_no);
    }
    auto [it, inserted] = page_of.try_emplace(title, corpus.pages.size());
    if (inserted) corpus.pages.push_back(Page{title, {}});
    corpus.pages[it->second].sentences.push_back(std::move(sentence));
  }

  detail::parallel_for(corpus.pages.size(), workers, [&](std::size_t i) {
    corpus.pages[i] = propagate_first_mention(
        augment_title_annotations(std::move(corpus.pages[i])));
  });

  corpus.recount();
  return corpus;
}

}  // namespace qel
