#pragma once

#include "vgiq/error.hpp"
#include "vgiq/osm_model.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vgiq::text {

/// Word tokens are maximal runs of letters, digits and combining marks,
/// with apostrophes allowed between word characters. Every other
/// non-space character is a token of its own.
std::vector<std::string> tokenize(std::string_view text);

/// True when the token has no letter or digit.
bool is_punctuation(std::string_view token);

inline constexpr std::size_t max_field_length = 255;

struct LengthClasses {
    std::map<std::size_t, double> histogram;  // length (code points) -> share
    double short_share = 0.0;                 // length <= split_at
    double long_share = 0.0;
    std::size_t overlong = 0;                 // length > 255, still counted
    std::size_t n = 0;
};

/// Throws std::invalid_argument if split_at < 1.
LengthClasses length_classes(std::span<const std::string> values, std::size_t split_at = 20);

/// surface (NFC lowercase) -> lemma
using Lexicon = std::map<std::string, std::string>;

struct LexiconParse {
    Lexicon lexicon;
    std::vector<Reject> rejects;  // 1-based line numbers
};

/// `surface;lemma` per line; surfaces are lowercased on load.
LexiconParse parse_lexicon_csv(std::string_view bytes);

struct LemmaCount {
    std::string lemma;
    std::size_t count = 0;
};

/// Ranked by descending count, ties by lemma.
std::vector<LemmaCount> lemma_frequencies(std::span<const std::string> values,
                                          const Lexicon& lexicon);

struct PosDistribution {
    std::string label;
    std::map<std::string, double> freq;
};

/// L1 distance over the union of tags. Throws std::invalid_argument if a
/// distribution does not sum to 1 within 1e-6.
double pos_distance(const PosDistribution& p, const PosDistribution& q);

struct TaggedToken {
    std::string surface;
    std::string lemma;
    std::string pos;
};

struct PosFileParse {
    PosDistribution distribution;
    std::vector<TaggedToken> tokens;
    std::vector<Reject> rejects;  // 1-based line numbers
};

/// token<TAB>lemma<TAB>pos per line, '#' starts a comment line.
/// Throws std::domain_error when no valid token line remains.
PosFileParse pos_distribution_from_file(std::string_view bytes, std::string label);

struct TextSelection {
    std::vector<std::string> values;
    std::size_t overlong_excluded = 0;
    std::size_t suffix_key_values = 0;  // elements continuing the text in inscription_1 etc.
    std::size_t missing = 0;
};

/// Values of `key` on the given elements. Overlong values and elements
/// with numbered continuation keys (`key_1`, `key:2`, ...) are excluded
/// and counted.
TextSelection select_values(std::span<const OsmElement> elements, const std::string& key);

} // namespace vgiq::text
