#include "vgiq/unicode.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace vgiq::unicode {

namespace {

const icu::Normalizer2& nfc_instance()
{
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status) || norm == nullptr) {
        throw std::runtime_error("ICU NFC normalizer unavailable");
    }
    return *norm;
}

std::string to_utf8(const icu::UnicodeString& s)
{
    std::string out;
    s.toUTF8String(out);
    return out;
}

icu::UnicodeString normalize(const icu::UnicodeString& s)
{
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString out = nfc_instance().normalize(s, status);
    if (U_FAILURE(status)) {
        throw std::runtime_error("NFC normalization failed");
    }
    return out;
}

} // namespace

std::string nfc(std::string_view utf8)
{
    const auto src = icu::UnicodeString::fromUTF8(
        icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    UErrorCode status = U_ZERO_ERROR;
    if (nfc_instance().isNormalized(src, status) && U_SUCCESS(status) && is_valid_utf8(utf8)) {
        return std::string(utf8);
    }
    return to_utf8(normalize(src));
}

std::string lower_nfc(std::string_view utf8)
{
    auto s = icu::UnicodeString::fromUTF8(
        icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    s.toLower(icu::Locale::getRoot());
    return to_utf8(normalize(s));
}

std::size_t length(std::string_view utf8)
{
    std::size_t n = 0;
    int32_t i = 0;
    const auto len = static_cast<int32_t>(utf8.size());
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    while (i < len) {
        UChar32 c;
        U8_NEXT(s, i, len, c);
        ++n;
    }
    return n;
}

bool is_valid_utf8(std::string_view utf8)
{
    int32_t i = 0;
    const auto len = static_cast<int32_t>(utf8.size());
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    while (i < len) {
        UChar32 c;
        U8_NEXT(s, i, len, c);
        if (c < 0) {
            return false;
        }
    }
    return true;
}

} // namespace vgiq::unicode
