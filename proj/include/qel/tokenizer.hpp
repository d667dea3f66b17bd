#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qel {

// One token: the original byte slice of the source text plus a lowercased
// form used for matching. Offsets are byte positions in the source.
struct Token {
  std::string text;
  std::string norm;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Splits on whitespace and punctuation boundaries. Non-ASCII codepoints
// outside the common Unicode space/punctuation blocks count as word
// characters; ASCII and Latin-1 letters are lowercased in `norm`. The same
// tokenizer is shared by parsing, indexing, statistics and query matching.
std::vector<Token> tokenize(std::string_view text);

std::vector<std::string> normalized_tokens(std::string_view text);

// Tokens joined with single spaces; the canonical anchor key.
std::string normalized_key(std::string_view text);
std::string join_tokens(const std::vector<std::string>& tokens);
std::vector<std::string> split_key(std::string_view key);

// Contiguous subsequence test; an empty needle never matches.
bool contains_subsequence(const std::vector<std::string>& haystack,
                          const std::vector<std::string>& needle);

// "Austin (song)" -> "Austin "; parenthesized spans are dropped.
std::string strip_parenthetical(std::string_view title);

// Trims and collapses whitespace runs; titles compare byte-exact afterwards.
std::string normalize_title(std::string_view title);

}  // namespace qel
