#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace vgiq::unicode {

/// NFC normal form of UTF-8 text. Invalid sequences become U+FFFD.
std::string nfc(std::string_view utf8);

/// Full Unicode lowercase (root locale) followed by NFC.
std::string lower_nfc(std::string_view utf8);

/// Number of Unicode scalar values.
std::size_t length(std::string_view utf8);

bool is_valid_utf8(std::string_view utf8);

} // namespace vgiq::unicode
