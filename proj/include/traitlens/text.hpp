#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace traitlens {

// Offsets everywhere in the library count unicode scalar values, so the
// canonical in-memory text form is UTF-32.
std::u32string utf8_to_u32(std::string_view utf8);
std::string u32_to_utf8(std::u32string_view text);

bool is_space(char32_t c);
std::u32string_view trim(std::u32string_view s);
std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

// FNV-1a, used for stable content-derived identifiers.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace traitlens
