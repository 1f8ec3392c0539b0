#include "ctxemb/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ctxemb {

namespace {

bool is_letter(char32_t cp) {
    if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
    if (cp == 0x386 || (cp >= 0x388 && cp <= 0x3FF)) return cp != 0x3A2;
    if (cp >= 0x400 && cp <= 0x481) return true;
    if (cp >= 0x48A && cp <= 0x52F) return true;
    return false;
}

// Simple case folding for the scripts accepted by is_letter.
char32_t to_lower(char32_t cp) {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 0x20 : cp;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177))
        return (cp % 2 == 0) ? cp + 1 : cp;
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E))
        return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x391 && cp <= 0x3A9) return cp + 0x20;
    if (cp == 0x386) return 0x3AC;
    if (cp >= 0x388 && cp <= 0x38A) return cp + 0x25;
    if (cp == 0x38C) return 0x3CC;
    if (cp == 0x38E || cp == 0x38F) return cp + 0x3F;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
    if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
    if ((cp >= 0x460 && cp <= 0x481) || (cp >= 0x48A && cp <= 0x4BF))
        return (cp % 2 == 0) ? cp + 1 : cp;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Expected length of a UTF-8 sequence from its lead byte; 0 if invalid.
int sequence_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if (lead >= 0xC2 && lead <= 0xDF) return 2;
    if (lead >= 0xE0 && lead <= 0xEF) return 3;
    if (lead >= 0xF0 && lead <= 0xF4) return 4;
    return 0;
}

constexpr const char* kDefaultStopwords[] = {
    "a",       "about",  "above",   "after",  "again",   "against", "all",    "am",
    "an",      "and",    "any",     "are",    "as",      "at",      "be",     "because",
    "been",    "before", "being",   "below",  "between", "both",    "but",    "by",
    "can",     "could",  "did",     "do",     "does",    "doing",   "down",   "during",
    "each",    "few",    "for",     "from",   "further", "had",     "has",    "have",
    "having",  "he",     "her",     "here",   "hers",    "herself", "him",    "himself",
    "his",     "how",    "i",       "if",     "in",      "into",    "is",     "it",
    "its",     "itself", "just",    "me",     "more",    "most",    "my",     "myself",
    "no",      "nor",    "not",     "now",    "of",      "off",     "on",     "once",
    "only",    "or",     "other",   "our",    "ours",    "ourselves", "out",  "over",
    "own",     "same",   "she",     "should", "so",      "some",    "such",   "than",
    "that",    "the",    "their",   "theirs", "them",    "themselves", "then", "there",
    "these",   "they",   "this",    "those",  "through", "to",      "too",    "under",
    "until",   "up",     "very",    "was",    "we",      "were",    "what",   "when",
    "where",   "which",  "while",   "who",    "whom",    "why",     "will",   "with",
    "would",   "you",    "your",    "yours",  "yourself", "yourselves",
};

}  // namespace

void TokenStream::append(const TokenStream& other) {
    if (other.empty()) return;
    if (!tokens.empty()) break_after.back() = 1;
    tokens.insert(tokens.end(), other.tokens.begin(), other.tokens.end());
    break_after.insert(break_after.end(), other.break_after.begin(), other.break_after.end());
}

std::string TokenStream::join() const {
    std::string out;
    for (std::size_t p = 0; p < tokens.size(); ++p) {
        if (p > 0) out.push_back(' ');
        out += tokens[p];
        if (break_after[p]) out.push_back('.');
    }
    return out;
}

void Tokenizer::flush_token() {
    if (current_.empty()) return;
    out_.tokens.push_back(std::move(current_));
    out_.break_after.push_back(0);
    current_.clear();
}

void Tokenizer::mark_boundary() {
    flush_token();
    if (!out_.tokens.empty()) out_.break_after.back() = 1;
}

void Tokenizer::invalid_byte() {
    ++warnings_;
    flush_token();
    newlines_ = 0;
}

void Tokenizer::consume(char32_t cp) {
    if (is_letter(cp)) {
        append_utf8(current_, to_lower(cp));
        newlines_ = 0;
        return;
    }
    flush_token();
    if (cp == '\n') {
        if (++newlines_ == 2) mark_boundary();
    } else if (cp == ' ' || cp == '\t' || cp == '\r' || cp == '\f' || cp == '\v') {
        // whitespace keeps a run of newlines "blank"
    } else {
        newlines_ = 0;
        if (cp == '.' || cp == '!' || cp == '?') mark_boundary();
    }
}

void Tokenizer::feed(std::string_view chunk) {
    std::string_view data = chunk;
    std::string joined;
    if (!pending_.empty()) {
        joined = std::move(pending_);
        joined.append(chunk);
        pending_.clear();
        data = joined;
    }
    std::size_t i = 0;
    while (i < data.size()) {
        auto lead = static_cast<unsigned char>(data[i]);
        int len = sequence_length(lead);
        if (len == 0) {
            invalid_byte();
            ++i;
            continue;
        }
        if (len == 1) {
            consume(lead);
            ++i;
            continue;
        }
        if (i + len > data.size()) {
            // Might complete in the next chunk; still validate what we have.
            bool ok = true;
            for (std::size_t k = i + 1; k < data.size(); ++k)
                if ((static_cast<unsigned char>(data[k]) & 0xC0) != 0x80) ok = false;
            if (ok) {
                pending_.assign(data.substr(i));
                return;
            }
        }
        char32_t cp = lead & (0xFF >> (len + 1));
        bool ok = i + len <= data.size();
        for (int k = 1; ok && k < len; ++k) {
            auto b = static_cast<unsigned char>(data[i + k]);
            if ((b & 0xC0) != 0x80) ok = false;
            cp = (cp << 6) | (b & 0x3F);
        }
        // reject overlong forms, surrogates and out-of-range values
        if (ok && ((len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
                   (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF))
            ok = false;
        if (!ok) {
            invalid_byte();
            ++i;
            continue;
        }
        consume(cp);
        i += len;
    }
}

TokenStream Tokenizer::finish() {
    if (!pending_.empty()) {
        invalid_byte();
        pending_.clear();
    }
    flush_token();
    newlines_ = 0;
    TokenStream result = std::move(out_);
    out_ = TokenStream{};
    return result;
}

TokenStream tokenize(std::string_view text, std::size_t* warnings) {
    Tokenizer tok;
    tok.feed(text);
    TokenStream stream = tok.finish();
    if (warnings) *warnings = tok.warnings();
    return stream;
}

TokenStream tokenize_file(const std::string& path, std::size_t* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus: " + path);
    Tokenizer tok;
    std::string buf(1 << 20, '\0');
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        auto got = static_cast<std::size_t>(in.gcount());
        if (got == 0) break;
        tok.feed(std::string_view(buf.data(), got));
    }
    TokenStream stream = tok.finish();
    if (warnings) *warnings = tok.warnings();
    return stream;
}

const WordSet& default_stopwords() {
    static const WordSet words(std::begin(kDefaultStopwords), std::end(kDefaultStopwords));
    return words;
}

WordSet load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open stopword file: " + path);
    WordSet words;
    std::string line;
    while (std::getline(in, line)) {
        auto fields = split_ws(line);
        if (fields.empty() || fields[0].front() == '#') continue;
        TokenStream t = tokenize(fields[0]);
        for (auto& w : t.tokens) words.insert(w);
    }
    return words;
}

Vocabulary::Vocabulary(std::vector<std::pair<std::string, std::uint64_t>> entries) {
    words_.reserve(entries.size());
    freqs_.reserve(entries.size());
    index_.reserve(entries.size());
    for (auto& [word, freq] : entries) {
        auto id = static_cast<WordId>(words_.size());
        if (!index_.emplace(word, id).second)
            throw DataError("duplicate vocabulary word: " + word);
        words_.push_back(std::move(word));
        freqs_.push_back(freq);
    }
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

WordId Vocabulary::at(std::string_view word) const {
    auto id = find(word);
    if (!id) throw DataError("word not in vocabulary: " + std::string(word));
    return *id;
}

std::uint64_t Vocabulary::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](unsigned char c) {
        h ^= c;
        h *= 1099511628211ULL;
    };
    for (std::size_t i = 0; i < words_.size(); ++i) {
        for (char c : words_[i]) mix(static_cast<unsigned char>(c));
        mix('\t');
        for (int b = 0; b < 8; ++b) mix(static_cast<unsigned char>(freqs_[i] >> (8 * b)));
        mix('\n');
    }
    return h;
}

void Vocabulary::save(std::ostream& out) const {
    out << "VOCABv1\t" << words_.size() << '\n';
    for (std::size_t i = 0; i < words_.size(); ++i) out << words_[i] << '\t' << freqs_[i] << '\n';
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write vocabulary: " + path);
    save(out);
    if (!out) throw DataError("write failed: " + path);
}

Vocabulary Vocabulary::load(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError(name, 1, "missing VOCABv1 header");
    auto header = split(line, '\t');
    std::uint64_t declared = 0;
    if (header.size() != 2 || header[0] != "VOCABv1" || !parse_uint(header[1], declared))
        throw FormatError(name, 1, "expected header 'VOCABv1\\t<V>'");
    std::vector<std::pair<std::string, std::uint64_t>> entries;
    WordSet seen;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto fields = split(line, '\t');
        std::uint64_t freq = 0;
        if (fields.size() != 2 || fields[0].empty() || !parse_uint(fields[1], freq))
            throw FormatError(name, lineno, "expected '<word>\\t<freq>'");
        if (!seen.insert(std::string(fields[0])).second)
            throw FormatError(name, lineno, "duplicate word '" + std::string(fields[0]) + "'");
        entries.emplace_back(std::string(fields[0]), freq);
    }
    if (entries.size() != declared)
        throw FormatError(name, lineno, "header declares " + std::to_string(declared) +
                                            " words, found " + std::to_string(entries.size()));
    return Vocabulary(std::move(entries));
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open vocabulary: " + path);
    return load(in, path);
}

std::unordered_map<std::string, std::uint64_t> count_tokens(const TokenStream& stream,
                                                            std::size_t threads) {
    std::vector<std::unordered_map<std::string, std::uint64_t>> partial(
        std::max<std::size_t>(threads, 1));
    parallel_shards(stream.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t s) {
        auto& counts = partial[s];
        for (std::size_t p = begin; p < end; ++p) ++counts[stream.tokens[p]];
    });
    auto merged = std::move(partial[0]);
    for (std::size_t s = 1; s < partial.size(); ++s)
        for (auto& [word, n] : partial[s]) merged[word] += n;
    return merged;
}

Vocabulary build_vocabulary(const TokenStream& stream, std::uint64_t min_count,
                            const WordSet& stopwords, std::size_t threads) {
    if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
    auto counts = count_tokens(stream, threads);
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (auto& [word, n] : counts)
        if (n >= min_count && !stopwords.count(word)) kept.emplace_back(word, n);
    if (kept.empty())
        throw DataError("empty vocabulary (min_count=" + std::to_string(min_count) +
                        ", stopwords=" + std::to_string(stopwords.size()) +
                        ", tokens=" + std::to_string(stream.size()) + ")");
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return Vocabulary(std::move(kept));
}

}  // namespace ctxemb
