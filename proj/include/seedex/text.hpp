#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace seedex::text {

// Lower-cases ASCII, Latin-1 Supplement and the Latin Extended-A pairs used
// by French (Œ, Ÿ, ...). Other code points are copied through unchanged.
std::string casefold(std::string_view utf8);

// Number of code points; invalid lead bytes count as one each.
std::size_t utf8_length(std::string_view utf8);

// Decodes the code point starting at `pos`; its byte width goes to *width.
// Malformed sequences decode as the single byte value with width 1.
char32_t decode_utf8(std::string_view utf8, std::size_t pos, std::size_t* width);

// printf-style %.17g; parsing the text back yields the identical double.
std::string format_g17(double value);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

std::string sha256_hex(std::string_view bytes);

std::string html_escape(std::string_view raw);

// Quotes a CSV field when it holds a comma, quote or line break.
std::string csv_field(std::string_view raw);

}  // namespace seedex::text
