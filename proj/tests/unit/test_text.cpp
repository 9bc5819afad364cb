#include "doctest.h"

#include "vgiq/text.hpp"

#include <random>

using namespace vgiq;
using namespace vgiq::text;

namespace {

using Tokens = std::vector<std::string>;

PosDistribution random_distribution(std::mt19937_64& rng, const std::vector<std::string>& tags)
{
    PosDistribution d{"r", {}};
    double sum = 0.0;
    std::vector<double> w(tags.size());
    for (auto& x : w) {
        x = (rng() % 4 == 0) ? 0.0 : static_cast<double>(rng() % 1000 + 1);
        sum += x;
    }
    if (sum == 0.0) {
        w[0] = sum = 1.0;
    }
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (w[i] > 0.0) {
            d.freq[tags[i]] = w[i] / sum;
        }
    }
    return d;
}

} // namespace

TEST_CASE("tokenize")
{
    CHECK(tokenize("Wegkreuz am Weg") == Tokens{"Wegkreuz", "am", "Weg"});
    CHECK(tokenize("INRI, 1850.") == Tokens{"INRI", ",", "1850", "."});
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \t\n").empty());
    CHECK(tokenize("Gr\xC3\xBC\xC3\x9F Gott!") == Tokens{"Gr\xC3\xBC\xC3\x9F", "Gott", "!"});
    CHECK(tokenize("geht's 'gut'") == Tokens{"geht's", "'", "gut", "'"});
    CHECK(tokenize("1.8.1850") == Tokens{"1", ".", "8", ".", "1850"});
    CHECK(tokenize("\xE2\x80\x9EGelobt\xE2\x80\x9C") == Tokens{"\xE2\x80\x9E", "Gelobt", "\xE2\x80\x9C"});
}

TEST_CASE("tokenize is idempotent through space-joining")
{
    const std::vector<std::string> samples{
        "Gelobt sei Jesus Christus! 1850", "Zur Erinnerung an J.B., gest. 12.3.1910",
        "O Mensch, bedenk's  wohl...", "INRI", "\xE2\x80\x9EHerr, gib ihm die ewige Ruhe\xE2\x80\x9C"};
    for (const auto& s : samples) {
        const auto tokens = tokenize(s);
        std::string joined;
        for (const auto& t : tokens) {
            CHECK_FALSE(t.empty());
            if (!joined.empty()) joined += ' ';
            joined += t;
        }
        CHECK(tokenize(joined) == tokens);
    }
}

TEST_CASE("length classes")
{
    const std::vector<std::string> inri{"INRI", "INRI"};
    const auto a = length_classes(inri);
    CHECK(a.histogram == std::map<std::size_t, double>{{4, 1.0}});
    CHECK(a.short_share == 1.0);

    const std::vector<std::string> mixed{"INRI", std::string(30, 'x')};
    const auto b = length_classes(mixed);
    CHECK(b.short_share == 0.5);
    CHECK(b.long_share == 0.5);

    const std::vector<std::string> huge{std::string(256, 'x')};
    const auto c = length_classes(huge);
    CHECK(c.overlong == 1);
    CHECK(c.histogram.at(256) == 1.0);

    const std::vector<std::string> umlaut{"\xC3\xA4\xC3\xB6\xC3\xBC"};
    CHECK(length_classes(umlaut).histogram.count(3) == 1);
    CHECK_THROWS_AS(length_classes(inri, 0), std::invalid_argument);
}

TEST_CASE("lemma frequencies")
{
    const std::vector<std::string> values{"Wegkreuz", "Wegkreuz am Weg"};
    const auto f = lemma_frequencies(values, {});
    REQUIRE(f.size() == 3);
    CHECK(f[0].lemma == "Wegkreuz");
    CHECK(f[0].count == 2);
    CHECK(f[1].lemma == "Weg");
    CHECK(f[2].lemma == "am");

    const std::vector<std::string> dots{"...."};
    CHECK(lemma_frequencies(dots, {}).empty());

    const Lexicon lex{{"kreuze", "Kreuz"}};
    const std::vector<std::string> k{"Kreuze"};
    const auto l = lemma_frequencies(k, lex);
    REQUIRE(l.size() == 1);
    CHECK(l[0].lemma == "Kreuz");
}

TEST_CASE("lemma totals equal non-punctuation token count")
{
    const std::vector<std::string> values{"Gelobt sei Jesus Christus!", "INRI, 1850.", "zum Gedenken an ...",
                                          "Kreuze und Kreuz"};
    const Lexicon lex{{"kreuze", "Kreuz"}, {"gelobt", "loben"}};
    std::size_t tokens = 0;
    for (const auto& v : values) {
        for (const auto& t : tokenize(v)) {
            tokens += is_punctuation(t) ? 0 : 1;
        }
    }
    std::size_t total = 0;
    for (const auto& lc : lemma_frequencies(values, lex)) {
        total += lc.count;
    }
    CHECK(total == tokens);
}

TEST_CASE("lexicon CSV")
{
    const auto p = parse_lexicon_csv("surface;lemma\nkreuze;Kreuz\nK\xC3\x84PPELE;Kapelle\nbroken\n");
    CHECK(p.lexicon.at("kreuze") == "Kreuz");
    CHECK(p.lexicon.at("k\xC3\xA4ppele") == "Kapelle");
    REQUIRE(p.rejects.size() == 1);
    CHECK(p.rejects[0].index == 4);
}

TEST_CASE("pos distance")
{
    const PosDistribution p{"p", {{"NN", 0.5}, {"NE", 0.5}}};
    const PosDistribution q{"q", {{"ART", 0.25}, {"CARD", 0.75}}};
    CHECK(pos_distance(p, p) == 0.0);
    CHECK(pos_distance(p, q) == 2.0);
    const PosDistribution r{"r", {{"NN", 0.25}, {"ART", 0.75}}};
    CHECK(pos_distance(p, r) == doctest::Approx(1.5));
    const PosDistribution bad{"bad", {{"NN", 0.5}}};
    CHECK_THROWS_AS(pos_distance(p, bad), std::invalid_argument);
}

TEST_CASE("pos distance metric properties")
{
    const std::vector<std::string> tags{"NN", "NE", "ART", "APPRART", "ADJA", "ADJD", "CARD", "$,", "$.", "VVFIN"};
    std::mt19937_64 rng(500);
    for (int i = 0; i < 500; ++i) {
        const auto a = random_distribution(rng, tags);
        const auto b = random_distribution(rng, tags);
        const auto c = random_distribution(rng, tags);
        const double ab = pos_distance(a, b);
        CHECK(ab == doctest::Approx(pos_distance(b, a)).epsilon(1e-15));
        CHECK(pos_distance(a, a) == 0.0);
        CHECK(ab >= 0.0);
        CHECK(ab <= 2.0 + 1e-12);
        CHECK(pos_distance(a, c) <= ab + pos_distance(b, c) + 1e-12);
    }
}

TEST_CASE("tagged token files")
{
    const auto p = pos_distribution_from_file("# comment\nKreuz\tKreuz\tNN\nWeg\tWeg\tNN\n1850\t1850\tCARD\n", "x");
    CHECK(p.distribution.label == "x");
    CHECK(p.distribution.freq.at("NN") == doctest::Approx(2.0 / 3.0));
    CHECK(p.distribution.freq.at("CARD") == doctest::Approx(1.0 / 3.0));
    CHECK(p.tokens.size() == 3);

    const auto one = pos_distribution_from_file("INRI\tINRI\tNE", "one");
    CHECK(one.distribution.freq == std::map<std::string, double>{{"NE", 1.0}});

    const auto rej = pos_distribution_from_file("a\tb\tNN\nmalformed line\n\tx\tNN\n", "r");
    CHECK(rej.rejects.size() == 2);
    CHECK(rej.distribution.freq.at("NN") == 1.0);

    CHECK_THROWS_AS(pos_distribution_from_file("# only\n# comments\n", "c"), std::domain_error);
    CHECK_THROWS_AS(pos_distribution_from_file("", "c"), std::domain_error);
}

TEST_CASE("value selection excludes overlong and continued inscriptions")
{
    auto make = [](Tags t) {
        OsmElement e;
        e.tags = std::move(t);
        return e;
    };
    const std::vector<OsmElement> els{
        make({{"inscription", "INRI"}}),
        make({{"inscription", std::string(300, 'a')}}),
        make({{"inscription", "Teil 1"}, {"inscription_1", "Teil 2"}}),
        make({{"name", "Kreuz"}}),
        make({{"inscription:de", "Gelobt"}}),
    };
    const auto s = select_values(els, "inscription");
    CHECK(s.values == std::vector<std::string>{"INRI"});
    CHECK(s.overlong_excluded == 1);
    CHECK(s.suffix_key_values == 1);
    CHECK(s.missing == 2);
}
