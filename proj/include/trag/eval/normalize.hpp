#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace trag::eval {

/// SQuAD answer normalization: lowercase, drop punctuation (ASCII punctuation
/// plus every Unicode P* code point), drop the whole words "a", "an", "the",
/// collapse whitespace. Invalid UTF-8 bytes become U+FFFD.
std::string normalize_answer(std::string_view s);

/// normalize_answer(s) split on whitespace.
std::vector<std::string> normalized_tokens(std::string_view s);

bool is_unicode_punctuation(char32_t cp);
char32_t to_lower(char32_t cp);

}  // namespace trag::eval
