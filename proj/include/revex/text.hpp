#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace revex::text {

/// Lowercased tokens split on non-alphanumeric code points. Tokens shorter
/// than two code points are dropped; stopwords only when requested.
std::vector<std::string> tokenize(std::string_view text, bool drop_stopwords = false);

/// Tokens that survive stopword removal (TF-IDF and LDA vocabulary input).
inline std::vector<std::string> content_tokens(std::string_view text) {
    return tokenize(text, true);
}

bool is_stopword(std::string_view token);

/// Unicode scalar values; invalid UTF-8 bytes count one each.
std::size_t char_count(std::string_view text);

/// Tokens before stopword removal.
std::size_t word_count(std::string_view text);

/// Each run of [.!?] followed by whitespace or end of text closes a sentence;
/// trailing text without a terminator counts as one more. At least 1 for
/// text containing any non-whitespace, 0 otherwise.
std::size_t sentence_count(std::string_view text);

/// Decodes one code point starting at `pos`, advancing `pos`. Malformed
/// sequences yield U+FFFD and advance by one byte.
char32_t decode_utf8(std::string_view text, std::size_t& pos);
void append_utf8(std::string& out, char32_t cp);

bool is_alnum(char32_t cp);
char32_t to_lower(char32_t cp);

}  // namespace revex::text
