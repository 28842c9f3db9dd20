#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace brd::utf8 {

/// Decodes UTF-8; malformed bytes decode to U+FFFD one byte at a time.
std::u32string decode(std::string_view s);
std::string encode(std::u32string_view s);
void append(std::string& out, char32_t cp);

}  // namespace brd::utf8
