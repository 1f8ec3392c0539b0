#pragma once

// A pseudoword ("bank") with two senses realized by disjoint context-word
// sets A and B, plus filler words Z that never share a sentence with bank or
// with A/B words. Base vectors of A words live on the first half of the
// coordinates and those of B words on the second half.

#include <algorithm>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ctxemb/cooccurrence.hpp"
#include "ctxemb/corpus.hpp"
#include "ctxemb/embedding.hpp"

namespace synthetic {

inline std::string letters_name(const std::string& prefix, std::size_t i) {
    std::string s = prefix;
    s.push_back(static_cast<char>('a' + (i / 26) % 26));
    s.push_back(static_cast<char>('a' + i % 26));
    return s;
}

struct Options {
    std::size_t words_per_sense = 20;
    std::size_t filler_words = 30;
    std::size_t occurrences = 500;  // sentences per sense
    std::size_t context_len = 5;
    std::size_t dim = 16;
    std::uint32_t radius = 5;
    std::uint64_t seed = 7;
};

class Corpus {
public:
    explicit Corpus(const Options& opt = {}) : opt_(opt), rng_(opt.seed) {
        for (std::size_t i = 0; i < opt.words_per_sense; ++i) {
            a_words.push_back(letters_name("fin", i));
            b_words.push_back(letters_name("geo", i));
        }
        for (std::size_t i = 0; i < opt.filler_words; ++i) z_words.push_back(letters_name("zed", i));

        for (const auto* sense : {&a_words, &b_words}) {
            for (std::size_t s = 0; s < opt.occurrences; ++s) {
                auto ctx = sample(*sense, opt.context_len);
                seen.insert(sorted(ctx));
                std::vector<std::string> sentence = ctx;
                std::size_t at = rng_() % (sentence.size() + 1);
                sentence.insert(sentence.begin() + static_cast<std::ptrdiff_t>(at), pseudoword);
                append_sentence(sentence);
            }
        }
        for (std::size_t s = 0; s < opt.occurrences; ++s) append_sentence(sample(z_words, opt.context_len + 1));

        stream = ctxemb::tokenize(text);
        vocab = ctxemb::build_vocabulary(stream, 1, {});
        auto raw = ctxemb::count_cooccurrences(stream, vocab, opt.radius);
        auto cooc = ctxemb::normalize(raw, vocab);

        std::uniform_real_distribution<double> unit(0.1, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const std::size_t half = opt.dim / 2;
        std::vector<double> data(vocab.size() * opt.dim, 0.0);
        for (ctxemb::WordId w = 0; w < vocab.size(); ++w) {
            const std::string& word = vocab.word(w);
            double* v = data.data() + w * opt.dim;
            if (word.rfind("fin", 0) == 0) {
                for (std::size_t c = 0; c < half; ++c) v[c] = unit(rng_);
            } else if (word.rfind("geo", 0) == 0) {
                for (std::size_t c = half; c < opt.dim; ++c) v[c] = unit(rng_);
            } else {
                for (std::size_t c = 0; c < opt.dim; ++c) v[c] = gauss(rng_);
            }
        }
        model.emplace(vocab, std::move(cooc), ctxemb::EmbeddingMatrix(opt.dim, std::move(data), vocab.hash()));
    }

    // n distinct words drawn from pool.
    std::vector<std::string> sample(const std::vector<std::string>& pool, std::size_t n) {
        std::vector<std::string> copy = pool;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t j = i + rng_() % (copy.size() - i);
            std::swap(copy[i], copy[j]);
        }
        copy.resize(n);
        return copy;
    }

    // A context of pool words that never appeared as a training sentence.
    std::vector<std::string> held_out(const std::vector<std::string>& pool) {
        while (true) {
            auto ctx = sample(pool, opt_.context_len);
            if (!seen.count(sorted(ctx))) return ctx;
        }
    }

    std::mt19937_64& rng() { return rng_; }
    const ctxemb::Model& get() const { return *model; }

    const std::string pseudoword = "bank";
    std::vector<std::string> a_words, b_words, z_words;
    std::set<std::vector<std::string>> seen;
    std::string text;
    ctxemb::TokenStream stream;
    ctxemb::Vocabulary vocab;
    std::optional<ctxemb::Model> model;

private:
    static std::vector<std::string> sorted(std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        return v;
    }

    void append_sentence(const std::vector<std::string>& words) {
        for (std::size_t i = 0; i < words.size(); ++i) {
            text += words[i];
            text += (i + 1 == words.size()) ? ".\n" : " ";
        }
    }

    Options opt_;
    std::mt19937_64 rng_;
};

}  // namespace synthetic
