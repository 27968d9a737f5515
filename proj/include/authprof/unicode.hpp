#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace authprof::unicode {

// Decodes one UTF-8 sequence starting at `pos`. On success advances `pos`
// past the sequence and returns the code point. Rejects overlong forms,
// surrogates and values above U+10FFFF. Returns false on malformed input
// with `pos` left at the offending byte.
bool decode_next(std::string_view text, std::size_t& pos, char32_t& out);

// Full-string decode. Throws std::invalid_argument naming the byte offset
// of the first malformed sequence.
std::vector<char32_t> decode(std::string_view text);

// True iff `text` is well-formed UTF-8. On failure `bad_offset` receives
// the offset of the offending byte.
bool validate(std::string_view text, std::size_t& bad_offset);

void append_utf8(std::string& out, char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

// Simple one-to-one lowercase mapping covering ASCII, Latin-1, Latin
// Extended-A, Greek and Cyrillic. Everything else maps to itself.
char32_t to_lower(char32_t cp);

// Unicode whitespace (the set used for word tokenization).
bool is_space(char32_t cp);

// Lowercases a UTF-8 string code point by code point. Throws
// std::invalid_argument on malformed input.
std::string lower_utf8(std::string_view text);

} // namespace authprof::unicode
