#include "vgiq/text.hpp"

#include "vgiq/unicode.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vgiq::text {

namespace {

enum class CharClass { word, apostrophe, space, other };

CharClass classify(UChar32 c)
{
    if (c == '\'' || c == 0x2019) {
        return CharClass::apostrophe;
    }
    if (u_isUWhiteSpace(c)) {
        return CharClass::space;
    }
    const auto mask = U_GET_GC_MASK(c);
    if (mask & (U_GC_L_MASK | U_GC_N_MASK | U_GC_M_MASK)) {
        return CharClass::word;
    }
    return CharClass::other;
}

struct CodePoint {
    UChar32 value;
    std::size_t begin;
    std::size_t end;
};

std::vector<CodePoint> decode(std::string_view s)
{
    std::vector<CodePoint> out;
    const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
    const auto len = static_cast<int32_t>(s.size());
    int32_t i = 0;
    while (i < len) {
        const auto begin = static_cast<std::size_t>(i);
        UChar32 c;
        U8_NEXT(bytes, i, len, c);
        if (c < 0) {
            c = 0xFFFD;
        }
        out.push_back({c, begin, static_cast<std::size_t>(i)});
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view bytes)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= bytes.size()) {
        auto end = bytes.find('\n', start);
        if (end == std::string_view::npos) {
            end = bytes.size();
        }
        auto line = bytes.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

std::string_view strip_bom(std::string_view bytes)
{
    if (bytes.starts_with("\xEF\xBB\xBF")) {
        bytes.remove_prefix(3);
    }
    return bytes;
}

bool is_suffix_key(std::string_view key, std::string_view base)
{
    if (key.size() <= base.size() + 1 || !key.starts_with(base)) {
        return false;
    }
    const char sep = key[base.size()];
    if (sep != '_' && sep != ':') {
        return false;
    }
    const auto rest = key.substr(base.size() + 1);
    return std::all_of(rest.begin(), rest.end(), [](char c) { return c >= '0' && c <= '9'; });
}

} // namespace

std::vector<std::string> tokenize(std::string_view text)
{
    const auto cps = decode(text);
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < cps.size()) {
        const auto cls = classify(cps[i].value);
        if (cls == CharClass::space) {
            ++i;
            continue;
        }
        if (cls != CharClass::word) {
            tokens.emplace_back(text.substr(cps[i].begin, cps[i].end - cps[i].begin));
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < cps.size()) {
            const auto c = classify(cps[j].value);
            if (c == CharClass::word) {
                ++j;
            } else if (c == CharClass::apostrophe && j + 1 < cps.size() &&
                       classify(cps[j + 1].value) == CharClass::word) {
                j += 2;
            } else {
                break;
            }
        }
        tokens.emplace_back(text.substr(cps[i].begin, cps[j - 1].end - cps[i].begin));
        i = j;
    }
    return tokens;
}

bool is_punctuation(std::string_view token)
{
    for (const auto& cp : decode(token)) {
        const auto mask = U_GET_GC_MASK(cp.value);
        if (mask & (U_GC_L_MASK | U_GC_N_MASK)) {
            return false;
        }
    }
    return true;
}

LengthClasses length_classes(std::span<const std::string> values, std::size_t split_at)
{
    if (split_at < 1) {
        throw std::invalid_argument("length_classes: split_at must be >= 1");
    }
    LengthClasses out;
    out.n = values.size();
    if (values.empty()) {
        return out;
    }
    std::map<std::size_t, std::size_t> counts;
    std::size_t short_count = 0;
    for (const auto& v : values) {
        const auto len = unicode::length(v);
        ++counts[len];
        if (len <= split_at) {
            ++short_count;
        }
        if (len > max_field_length) {
            ++out.overlong;
        }
    }
    const auto n = static_cast<double>(values.size());
    for (const auto& [len, c] : counts) {
        out.histogram[len] = static_cast<double>(c) / n;
    }
    out.short_share = static_cast<double>(short_count) / n;
    out.long_share = static_cast<double>(values.size() - short_count) / n;
    return out;
}

LexiconParse parse_lexicon_csv(std::string_view bytes)
{
    LexiconParse out;
    const auto lines = split_lines(strip_bom(bytes));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = lines[i];
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto sep = line.find(';');
        if (sep == std::string_view::npos || sep == 0 || sep + 1 == line.size() ||
            line.find(';', sep + 1) != std::string_view::npos) {
            out.rejects.push_back({i + 1, "expected surface;lemma"});
            continue;
        }
        const auto surface = line.substr(0, sep);
        if (i == 0 && surface == "surface" && line.substr(sep + 1) == "lemma") {
            continue;  // header
        }
        out.lexicon[unicode::lower_nfc(surface)] = unicode::nfc(line.substr(sep + 1));
    }
    return out;
}

std::vector<LemmaCount> lemma_frequencies(std::span<const std::string> values,
                                          const Lexicon& lexicon)
{
    std::map<std::string, std::size_t> counts;
    for (const auto& value : values) {
        for (auto& token : tokenize(value)) {
            if (is_punctuation(token)) {
                continue;
            }
            const auto it = lexicon.find(unicode::lower_nfc(token));
            if (it != lexicon.end()) {
                ++counts[it->second];
            } else {
                ++counts[unicode::nfc(token)];
            }
        }
    }
    std::vector<LemmaCount> out;
    out.reserve(counts.size());
    for (const auto& [lemma, c] : counts) {
        out.push_back({lemma, c});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const LemmaCount& a, const LemmaCount& b) { return a.count > b.count; });
    return out;
}

double pos_distance(const PosDistribution& p, const PosDistribution& q)
{
    auto check = [](const PosDistribution& d) {
        double sum = 0.0;
        for (const auto& [tag, f] : d.freq) {
            if (!(f >= 0.0)) {
                throw std::invalid_argument("pos_distance: negative frequency in " + d.label);
            }
            sum += f;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            throw std::invalid_argument("pos_distance: distribution '" + d.label +
                                        "' is not normalized");
        }
    };
    check(p);
    check(q);

    double dist = 0.0;
    auto pi = p.freq.begin();
    auto qi = q.freq.begin();
    while (pi != p.freq.end() || qi != q.freq.end()) {
        if (qi == q.freq.end() || (pi != p.freq.end() && pi->first < qi->first)) {
            dist += pi->second;
            ++pi;
        } else if (pi == p.freq.end() || qi->first < pi->first) {
            dist += qi->second;
            ++qi;
        } else {
            dist += std::abs(pi->second - qi->second);
            ++pi;
            ++qi;
        }
    }
    return dist;
}

PosFileParse pos_distribution_from_file(std::string_view bytes, std::string label)
{
    PosFileParse out;
    out.distribution.label = std::move(label);
    const auto lines = split_lines(strip_bom(bytes));
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = lines[i];
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
        if (t1 == std::string_view::npos || t2 == std::string_view::npos ||
            line.find('\t', t2 + 1) != std::string_view::npos) {
            out.rejects.push_back({i + 1, "expected token<TAB>lemma<TAB>pos"});
            continue;
        }
        TaggedToken tok{std::string(line.substr(0, t1)), std::string(line.substr(t1 + 1, t2 - t1 - 1)),
                        std::string(line.substr(t2 + 1))};
        if (tok.surface.empty() || tok.pos.empty()) {
            out.rejects.push_back({i + 1, "empty token or pos"});
            continue;
        }
        ++counts[tok.pos];
        out.tokens.push_back(std::move(tok));
    }
    if (out.tokens.empty()) {
        throw std::domain_error("tagged token file '" + out.distribution.label +
                                "' contains no tokens");
    }
    const auto n = static_cast<double>(out.tokens.size());
    for (const auto& [pos, c] : counts) {
        out.distribution.freq[pos] = static_cast<double>(c) / n;
    }
    return out;
}

TextSelection select_values(std::span<const OsmElement> elements, const std::string& key)
{
    TextSelection out;
    for (const auto& e : elements) {
        const bool continued = std::any_of(e.tags.begin(), e.tags.end(), [&](const auto& kv) {
            return is_suffix_key(kv.first, key);
        });
        const auto it = e.tags.find(key);
        if (it == e.tags.end() && !continued) {
            ++out.missing;
            continue;
        }
        if (continued) {
            ++out.suffix_key_values;
            continue;
        }
        if (unicode::length(it->second) > max_field_length) {
            ++out.overlong_excluded;
            continue;
        }
        out.values.push_back(it->second);
    }
    return out;
}

} // namespace vgiq::text
