#include <doctest.h>

#include <random>
#include <sstream>

#include "ctxemb/corpus.hpp"
#include "oracles.hpp"

using namespace ctxemb;

TEST_CASE("tokenize lowercases and marks sentence boundaries") {
    auto s = tokenize("The Bank, the bank.");
    CHECK(s.tokens == std::vector<std::string>{"the", "bank", "the", "bank"});
    CHECK(s.break_after == std::vector<std::uint8_t>{0, 0, 0, 1});
}

TEST_CASE("tokenize of empty input is an empty stream") {
    auto s = tokenize("");
    CHECK(s.empty());
    CHECK(s.break_after.empty());
}

TEST_CASE("tokenize drops digits and splits on hyphens") {
    auto s = tokenize("e-mail 42 \xC3\xA9tude");
    CHECK(s.tokens == std::vector<std::string>{"e", "mail", "\xC3\xA9tude"});
    CHECK(s.break_after == std::vector<std::uint8_t>{0, 0, 0});
}

TEST_CASE("tokenize folds case outside ASCII") {
    auto s = tokenize("\xC3\x89TUDE \xD0\x91\xD0\xB0\xD0\xBD\xD0\xBA");  // ÉTUDE Банк
    CHECK(s.tokens == std::vector<std::string>{"\xC3\xA9tude", "\xD0\xB1\xD0\xB0\xD0\xBD\xD0\xBA"});
}

TEST_CASE("blank lines and ! ? are boundaries") {
    auto s = tokenize("one two\n\nthree! four? five\nsix");
    CHECK(s.tokens == std::vector<std::string>{"one", "two", "three", "four", "five", "six"});
    CHECK(s.break_after == std::vector<std::uint8_t>{0, 1, 1, 1, 0, 0});
    auto ws = tokenize("a\n  \t\nb");
    CHECK(ws.break_after == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("invalid UTF-8 is skipped and counted") {
    std::size_t warnings = 0;
    auto s = tokenize("ab\xFFgh \xC3 x \xE2\x82", &warnings);
    CHECK(s.tokens == std::vector<std::string>{"ab", "gh", "x"});
    CHECK(warnings == 3);
}

TEST_CASE("chunked feeding matches one-shot tokenization") {
    std::string text = "Caf\xC3\xA9 au lait. \xC3\x89t\xC3\xA9 \xD0\x91\xD0\xB0\xD0\xBD\xD0\xBA!\n\nfin";
    auto whole = tokenize(text);
    for (std::size_t cut = 0; cut <= text.size(); ++cut) {
        Tokenizer tok;
        tok.feed(std::string_view(text).substr(0, cut));
        tok.feed(std::string_view(text).substr(cut));
        auto s = tok.finish();
        CHECK(s.tokens == whole.tokens);
        CHECK(s.break_after == whole.break_after);
        CHECK(tok.warnings() == 0);
    }
}

TEST_CASE("re-tokenizing the joined stream is idempotent") {
    std::mt19937_64 rng(3);
    const std::string alphabet = "abcXYZ .,!?-\n0";
    for (int trial = 0; trial < 50; ++trial) {
        std::string text;
        for (int i = 0; i < 200; ++i) text.push_back(alphabet[rng() % alphabet.size()]);
        auto once = tokenize(text);
        auto twice = tokenize(once.join());
        CHECK(twice.tokens == once.tokens);
        CHECK(twice.break_after == once.break_after);
    }
}

TEST_CASE("build_vocabulary applies min_count") {
    TokenStream s{{"a", "b", "a", "c"}, {0, 0, 0, 0}};
    auto v = build_vocabulary(s, 2, {});
    REQUIRE(v.size() == 1);
    CHECK(v.word(0) == "a");
    CHECK(v.freq(0) == 2);
}

TEST_CASE("build_vocabulary removes stopwords and breaks ties lexicographically") {
    TokenStream s{{"a", "b", "a", "c"}, {0, 0, 0, 0}};
    auto v = build_vocabulary(s, 1, {"a"});
    CHECK(v.words() == std::vector<std::string>{"b", "c"});
    CHECK(v.freqs() == std::vector<std::uint64_t>{1, 1});
}

TEST_CASE("empty vocabulary names the thresholds") {
    TokenStream s{{"a"}, {0}};
    try {
        build_vocabulary(s, 5, {});
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("min_count=5") != std::string::npos);
    }
    CHECK_THROWS_AS(build_vocabulary(TokenStream{}, 1, {}), DataError);
    CHECK_THROWS_AS(build_vocabulary(s, 0, {}), std::invalid_argument);
}

TEST_CASE("vocabulary matches a counting oracle on a random stream") {
    std::mt19937_64 rng(11);
    TokenStream s;
    for (int i = 0; i < 10000; ++i) {
        std::size_t r = rng() % 400;
        // skewed so that many ties and a spread of frequencies appear
        std::string w = "w" + std::string(1, char('a' + r % 26)) + std::string(1, char('a' + (r * r / 400) % 26));
        s.tokens.push_back(w);
        s.break_after.push_back(rng() % 10 == 0);
    }
    WordSet stop{"waa", "wab"};
    for (std::uint64_t min_count : {1, 3, 20}) {
        for (std::size_t threads : {1, 3}) {
            auto v = build_vocabulary(s, min_count, stop, threads);
            auto counts = oracle::token_counts(s.tokens);
            std::vector<std::pair<std::string, std::uint64_t>> expected;
            for (auto& [w, c] : counts)
                if (c >= min_count && !stop.count(w)) expected.emplace_back(w, c);
            std::stable_sort(expected.begin(), expected.end(),
                             [](const auto& a, const auto& b) { return a.second > b.second; });
            REQUIRE(v.size() == expected.size());
            std::uint64_t total = 0;
            for (WordId i = 0; i < v.size(); ++i) {
                CHECK(v.word(i) == expected[i].first);
                CHECK(v.freq(i) == expected[i].second);
                total += v.freq(i);
            }
            CHECK(total <= s.size());
        }
    }
}

TEST_CASE("vocabulary file round trip and validation") {
    Vocabulary v({{"bank", 2}, {"river", 1}});
    std::stringstream ss;
    v.save(ss);
    CHECK(ss.str() == "VOCABv1\t2\nbank\t2\nriver\t1\n");
    auto back = Vocabulary::load(ss);
    CHECK(back == v);
    CHECK(back.hash() == v.hash());

    std::istringstream bad_header("VOCAB\t2\n");
    CHECK_THROWS_AS(Vocabulary::load(bad_header), FormatError);
    std::istringstream dup("VOCABv1\t2\nbank\t2\nbank\t1\n");
    try {
        Vocabulary::load(dup);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.line() == 3);
    }
    std::istringstream short_file("VOCABv1\t3\nbank\t2\n");
    CHECK_THROWS_AS(Vocabulary::load(short_file), FormatError);
}

TEST_CASE("bundled stopwords") {
    CHECK(default_stopwords().count("the") == 1);
    CHECK(default_stopwords().count("bank") == 0);
}
