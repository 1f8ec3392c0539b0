#include <doctest.h>

#include <random>
#include <sstream>

#include "ctxemb/cooccurrence.hpp"
#include "oracles.hpp"

using namespace ctxemb;

namespace {

TokenStream stream_of(std::vector<std::string> tokens) {
    TokenStream s;
    s.break_after.assign(tokens.size(), 0);
    s.tokens = std::move(tokens);
    return s;
}

Vocabulary vocab_of(const TokenStream& s) { return build_vocabulary(s, 1, {}); }

TokenStream random_stream(std::mt19937_64& rng, std::size_t n, std::size_t types, double break_rate) {
    TokenStream s;
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t p = 0; p < n; ++p) {
        std::size_t t = rng() % types;
        s.tokens.push_back(std::string(1, char('a' + t % 26)) + std::string(1, char('a' + t / 26)));
        s.break_after.push_back(u(rng) < break_rate);
    }
    return s;
}

void check_against_oracle(const TokenStream& s, const Vocabulary& v, std::uint32_t radius,
                          std::size_t threads) {
    auto raw = count_cooccurrences(s, v, radius, threads);
    auto expected = oracle::pair_counts(s, v, radius);
    REQUIRE(raw.nnz() == expected.size());
    for (const auto& e : raw.entries()) {
        auto it = expected.find({v.word(e.i), v.word(e.j)});
        REQUIRE(it != expected.end());
        CHECK(it->second == e.value);
    }
}

}  // namespace

TEST_CASE("adjacent pairs at radius 1") {
    auto s = stream_of({"river", "bank", "water"});
    auto v = vocab_of(s);
    auto raw = count_cooccurrences(s, v, 1);
    CHECK(raw.nnz() == 2);
    CHECK(raw.count(v.at("river"), v.at("bank")) == 1);
    CHECK(raw.count(v.at("bank"), v.at("water")) == 1);
    CHECK(raw.count(v.at("river"), v.at("water")) == 0);
}

TEST_CASE("repeated word pairs with itself") {
    auto s = stream_of({"a", "b", "a"});
    auto v = vocab_of(s);
    auto raw = count_cooccurrences(s, v, 2);
    CHECK(raw.nnz() == 2);
    CHECK(raw.count(v.at("a"), v.at("b")) == 2);
    CHECK(raw.count(v.at("a"), v.at("a")) == 1);
}

TEST_CASE("out-of-vocabulary tokens keep their positions") {
    auto s = stream_of({"a", "zz", "b"});
    Vocabulary v({{"a", 1}, {"b", 1}});
    CHECK(count_cooccurrences(s, v, 1).nnz() == 0);
    CHECK(count_cooccurrences(s, v, 2).count(0, 1) == 1);
}

TEST_CASE("windows stop at boundaries") {
    TokenStream s{{"a", "b", "c"}, {1, 0, 0}};
    auto v = vocab_of(s);
    auto raw = count_cooccurrences(s, v, 5);
    CHECK(raw.nnz() == 1);
    CHECK(raw.count(v.at("b"), v.at("c")) == 1);
    CHECK_THROWS_AS(count_cooccurrences(s, v, 0), std::invalid_argument);
}

TEST_CASE("streaming sharded counting equals brute-force enumeration") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 8; ++trial) {
        auto s = random_stream(rng, 500 + rng() % 2000, 5 + rng() % 60, 0.05);
        auto v = build_vocabulary(s, 1 + rng() % 3, {});
        std::uint32_t radius = 1 + static_cast<std::uint32_t>(rng() % 5);
        for (std::size_t threads : {1, 2, 7}) check_against_oracle(s, v, radius, threads);
    }
}

TEST_CASE("shard merge is commutative given a boundary at the chunk edge") {
    std::mt19937_64 rng(9);
    auto a = random_stream(rng, 700, 30, 0.02);
    auto b = random_stream(rng, 900, 30, 0.02);
    TokenStream whole = a;
    whole.append(b);
    auto v = vocab_of(whole);
    auto ca = count_cooccurrences(a, v, 3);
    auto cb = count_cooccurrences(b, v, 3);
    auto ab = ca;
    ab.merge(cb);
    auto ba = cb;
    ba.merge(ca);
    auto all = count_cooccurrences(whole, v, 3);
    CHECK(ab == ba);
    CHECK(ab == all);
}

TEST_CASE("normalize on the toy corpus") {
    auto s = stream_of({"river", "bank", "water", "money", "bank", "loan"});
    auto v = vocab_of(s);
    auto w = normalize(count_cooccurrences(s, v, 1), v);
    CHECK(w.nnz() == 5);
    CHECK(w.at(v.at("river"), v.at("bank")) == 0.5);
    CHECK(w.at(v.at("water"), v.at("money")) == 1.0);
    CHECK(w.at(v.at("river"), v.at("loan")) == 0.0);

    auto row = w.row(v.at("bank"));
    REQUIRE(row.size() == 4);
    for (const auto& cell : row) {
        CHECK(cell.value == 0.5);
        CHECK(v.word(cell.col) != "bank");
    }
}

TEST_CASE("normalize rejects zero frequencies") {
    Vocabulary v({{"a", 0}, {"b", 1}});
    RawCoocCounts raw(2, 1, {{0, 1, 1}});
    CHECK_THROWS_AS(normalize(raw, v), InvariantError);
}

TEST_CASE("rows are symmetric and out-of-range rows throw") {
    std::mt19937_64 rng(21);
    auto s = random_stream(rng, 3000, 40, 0.1);
    auto v = vocab_of(s);
    auto w = normalize(count_cooccurrences(s, v, 4), v);
    for (WordId i = 0; i < v.size(); ++i) {
        WordId prev = 0;
        bool first = true;
        for (const auto& cell : w.row(i)) {
            CHECK(cell.value > 0);
            CHECK(w.at(cell.col, i) == cell.value);
            if (!first) CHECK(cell.col > prev);
            prev = cell.col;
            first = false;
        }
    }
    auto raw = count_cooccurrences(s, v, 4);
    for (const auto& e : w.entries()) {
        double expected = static_cast<double>(raw.count(e.i, e.j)) /
                          (static_cast<double>(v.freq(e.i)) * static_cast<double>(v.freq(e.j)));
        CHECK(e.value == expected);
    }
    CHECK_THROWS_AS(w.row(static_cast<WordId>(v.size())), std::out_of_range);
}

TEST_CASE("row of a word without co-occurrences is empty") {
    TokenStream s{{"a", "b", "c"}, {0, 1, 0}};
    auto v = vocab_of(s);
    auto w = normalize(count_cooccurrences(s, v, 1), v);
    CHECK(w.row(v.at("c")).empty());
}

TEST_CASE("matrix file format round trips and is validated") {
    std::mt19937_64 rng(4);
    auto s = random_stream(rng, 2000, 25, 0.1);
    auto v = vocab_of(s);
    auto w = normalize(count_cooccurrences(s, v, 2), v);
    std::stringstream ss;
    w.save(ss);
    auto back = CoocMatrix::load(ss, v);
    CHECK(back.nnz() == w.nnz());
    CHECK(back.window_radius() == 2);
    CHECK(std::equal(back.entries().begin(), back.entries().end(), w.entries().begin()));

    Vocabulary v3({{"a", 1}, {"b", 1}, {"c", 1}});
    auto expect_line = [&](const std::string& text, std::size_t line) {
        std::istringstream in(text);
        try {
            CoocMatrix::load(in, v3);
            FAIL("expected FormatError for: " << text);
        } catch (const FormatError& e) {
            CHECK(e.line() == line);
        }
    };
    expect_line("COOC\t3\t1\t1\n0\t1\t0.5\n", 1);
    expect_line("COOCv1\t4\t1\t1\n0\t1\t0.5\n", 1);
    expect_line("COOCv1\t3\t2\t1\n0\t1\t0.5\n1\t0\t0.5\n", 3);
    expect_line("COOCv1\t3\t2\t1\n0\t2\t0.5\n0\t1\t0.5\n", 3);
    expect_line("COOCv1\t3\t1\t1\n0\t1\t0\n", 2);
    expect_line("COOCv1\t3\t1\t1\n0\t3\t1\n", 2);
    expect_line("COOCv1\t3\t2\t1\n0\t1\t0.5\n", 2);
}

TEST_CASE("restrict_to keeps values over the surviving words") {
    auto s = stream_of({"river", "bank", "water", "money", "bank", "loan"});
    auto v = vocab_of(s);
    auto w = normalize(count_cooccurrences(s, v, 1), v);
    auto sub = v.filter([&](WordId id) { return v.word(id) != "water"; });
    auto ws = w.restrict_to(v, sub);
    CHECK(ws.vocab_size() == 4);
    CHECK(ws.nnz() == 3);
    CHECK(ws.at(sub.at("bank"), sub.at("money")) == 0.5);
    CHECK(ws.vocab_hash() == sub.hash());
}
