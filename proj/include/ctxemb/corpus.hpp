#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ctxemb/common.hpp"

namespace ctxemb {

// Lowercase alphabetic tokens with sentence/document breaks.
// break_after[p] is set when a boundary separates position p from p + 1.
struct TokenStream {
    std::vector<std::string> tokens;
    std::vector<std::uint8_t> break_after;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }

    // Appends `other`, inserting a boundary between the two streams.
    void append(const TokenStream& other);

    // Space-joined tokens, with a ". " after every boundary.
    std::string join() const;
};

// Incremental UTF-8 tokenizer. Maximal runs of letters become lowercase
// tokens; everything else separates. '.', '!', '?' and blank lines mark
// boundaries. Invalid UTF-8 bytes are skipped (acting as separators) and
// counted in warnings().
class Tokenizer {
public:
    void feed(std::string_view chunk);
    TokenStream finish();

    std::size_t warnings() const { return warnings_; }

private:
    void consume(char32_t cp);
    void flush_token();
    void mark_boundary();
    void invalid_byte();

    TokenStream out_;
    std::string current_;
    std::string pending_;  // incomplete UTF-8 sequence carried across chunks
    std::size_t warnings_ = 0;
    int newlines_ = 0;  // consecutive newlines seen, whitespace-only between
};

TokenStream tokenize(std::string_view text, std::size_t* warnings = nullptr);
TokenStream tokenize_file(const std::string& path, std::size_t* warnings = nullptr);

using WordSet = std::unordered_set<std::string>;

// Bundled English stopword list.
const WordSet& default_stopwords();

// One word per line; blank lines and '#' comments ignored; lowercased.
WordSet load_stopwords(const std::string& path);

class Vocabulary {
public:
    Vocabulary() = default;

    // Entries must be distinct; index order is taken as given.
    explicit Vocabulary(std::vector<std::pair<std::string, std::uint64_t>> entries);

    std::size_t size() const { return words_.size(); }
    bool empty() const { return words_.empty(); }

    std::optional<WordId> find(std::string_view word) const;
    bool contains(std::string_view word) const { return find(word).has_value(); }
    WordId at(std::string_view word) const;

    const std::string& word(WordId id) const { return words_.at(id); }
    std::uint64_t freq(WordId id) const { return freqs_.at(id); }
    const std::vector<std::string>& words() const { return words_; }
    const std::vector<std::uint64_t>& freqs() const { return freqs_; }

    // FNV-1a over (word, freq) records in index order.
    std::uint64_t hash() const;

    // Entries of this vocabulary accepted by keep, in the same relative order.
    template <typename Pred>
    Vocabulary filter(Pred keep) const {
        std::vector<std::pair<std::string, std::uint64_t>> entries;
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (keep(static_cast<WordId>(i))) entries.emplace_back(words_[i], freqs_[i]);
        return Vocabulary(std::move(entries));
    }

    void save(std::ostream& out) const;
    void save(const std::string& path) const;
    static Vocabulary load(std::istream& in, const std::string& name = "<stream>");
    static Vocabulary load(const std::string& path);

    bool operator==(const Vocabulary& other) const {
        return words_ == other.words_ && freqs_ == other.freqs_;
    }

private:
    std::vector<std::string> words_;
    std::vector<std::uint64_t> freqs_;
    std::unordered_map<std::string, WordId> index_;
};

// Raw token counts; shards are counted in parallel and summed.
std::unordered_map<std::string, std::uint64_t> count_tokens(const TokenStream& stream,
                                                            std::size_t threads = 1);

// Words with count >= min_count not in stopwords, ordered by descending
// count then lexicographically. Throws DataError when nothing survives.
Vocabulary build_vocabulary(const TokenStream& stream, std::uint64_t min_count,
                            const WordSet& stopwords, std::size_t threads = 1);

}  // namespace ctxemb
