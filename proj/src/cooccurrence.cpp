#include "ctxemb/cooccurrence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace ctxemb {

namespace {

std::uint64_t pack(WordId a, WordId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

template <typename T>
bool entry_less(const SymEntry<T>& x, const SymEntry<T>& y) {
    return x.i != y.i ? x.i < y.i : x.j < y.j;
}

}  // namespace

RawCoocCounts::RawCoocCounts(std::size_t vocab_size, std::uint32_t window_radius,
                             std::vector<SymEntry<std::uint64_t>> entries)
    : vocab_size_(vocab_size), window_radius_(window_radius), entries_(std::move(entries)) {
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const auto& e = entries_[k];
        if (e.i > e.j || e.j >= vocab_size_ || e.value == 0 ||
            (k > 0 && !entry_less(entries_[k - 1], e)))
            throw InvariantError("raw counts must be canonical, sorted and positive");
    }
}

std::uint64_t RawCoocCounts::count(WordId a, WordId b) const {
    if (a > b) std::swap(a, b);
    SymEntry<std::uint64_t> key{a, b, 0};
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key, entry_less<std::uint64_t>);
    return (it != entries_.end() && it->i == a && it->j == b) ? it->value : 0;
}

void RawCoocCounts::merge(const RawCoocCounts& other) {
    if (other.vocab_size_ != vocab_size_ || other.window_radius_ != window_radius_)
        throw InvariantError("cannot merge counts with different vocabulary size or radius");
    std::vector<SymEntry<std::uint64_t>> out;
    out.reserve(entries_.size() + other.entries_.size());
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() || b != other.entries_.end()) {
        if (b == other.entries_.end() || (a != entries_.end() && entry_less(*a, *b))) {
            out.push_back(*a++);
        } else if (a == entries_.end() || entry_less(*b, *a)) {
            out.push_back(*b++);
        } else {
            out.push_back({a->i, a->j, a->value + b->value});
            ++a;
            ++b;
        }
    }
    entries_ = std::move(out);
}

std::vector<WordId> encode(const TokenStream& stream, const Vocabulary& vocab) {
    std::vector<WordId> ids(stream.size());
    for (std::size_t p = 0; p < stream.size(); ++p) {
        auto id = vocab.find(stream.tokens[p]);
        ids[p] = id ? *id : kNoWord;
    }
    return ids;
}

RawCoocCounts count_cooccurrences(const TokenStream& stream, const Vocabulary& vocab,
                                  std::uint32_t window_radius, std::size_t threads) {
    if (window_radius < 1) throw std::invalid_argument("window_radius must be >= 1");
    const std::vector<WordId> ids = encode(stream, vocab);
    const std::size_t n = ids.size();

    std::size_t shards = std::max<std::size_t>(threads, 1);
    std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> partial(shards);
    parallel_shards(n, shards, [&](std::size_t begin, std::size_t end, std::size_t s) {
        auto& counts = partial[s];
        for (std::size_t p = begin; p < end; ++p) {
            if (ids[p] == kNoWord) continue;
            for (std::size_t q = p + 1; q < n && q - p <= window_radius; ++q) {
                if (stream.break_after[q - 1]) break;
                if (ids[q] != kNoWord) ++counts[pack(ids[p], ids[q])];
            }
        }
    });

    auto& merged = partial[0];
    for (std::size_t s = 1; s < partial.size(); ++s)
        for (auto& [key, c] : partial[s]) merged[key] += c;

    std::vector<SymEntry<std::uint64_t>> entries;
    entries.reserve(merged.size());
    for (auto& [key, c] : merged)
        entries.push_back({static_cast<WordId>(key >> 32), static_cast<WordId>(key & 0xFFFFFFFFu), c});
    std::sort(entries.begin(), entries.end(), entry_less<std::uint64_t>);
    return RawCoocCounts(vocab.size(), window_radius, std::move(entries));
}

CoocMatrix::CoocMatrix(std::size_t vocab_size, std::uint32_t window_radius,
                       std::vector<SymEntry<double>> entries, std::uint64_t vocab_hash)
    : vocab_size_(vocab_size), window_radius_(window_radius), vocab_hash_(vocab_hash),
      entries_(std::move(entries)) {
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const auto& e = entries_[k];
        if (e.i > e.j || e.j >= vocab_size_ || !(e.value > 0) || !std::isfinite(e.value) ||
            (k > 0 && !entry_less(entries_[k - 1], e)))
            throw InvariantError("cooc entries must be canonical, sorted, finite and positive");
    }
    build_rows();
}

void CoocMatrix::build_rows() {
    row_ptr_.assign(vocab_size_ + 1, 0);
    for (const auto& e : entries_) {
        ++row_ptr_[e.i + 1];
        if (e.i != e.j) ++row_ptr_[e.j + 1];
    }
    for (std::size_t r = 0; r < vocab_size_; ++r) row_ptr_[r + 1] += row_ptr_[r];
    cells_.resize(row_ptr_.back());
    std::vector<std::size_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
    // Canonical order is (i, j) ascending, so the lower-triangle cells land in
    // each row before the upper-triangle ones and both runs are ascending.
    for (const auto& e : entries_) {
        if (e.i != e.j) cells_[fill[e.j]++] = {e.i, e.value};
    }
    for (const auto& e : entries_) cells_[fill[e.i]++] = {e.j, e.value};
}

std::span<const CoocMatrix::Cell> CoocMatrix::row(WordId i) const {
    if (i >= vocab_size_)
        throw std::out_of_range("row index " + std::to_string(i) + " out of range (V=" +
                                std::to_string(vocab_size_) + ")");
    return {cells_.data() + row_ptr_[i], cells_.data() + row_ptr_[i + 1]};
}

double CoocMatrix::at(WordId i, WordId j) const {
    auto r = row(i);
    if (j >= vocab_size_) throw std::out_of_range("column index out of range");
    auto it = std::lower_bound(r.begin(), r.end(), j,
                               [](const Cell& c, WordId col) { return c.col < col; });
    return (it != r.end() && it->col == j) ? it->value : 0.0;
}

CoocMatrix CoocMatrix::scaled(double factor) const {
    if (!(factor > 0) || !std::isfinite(factor))
        throw std::invalid_argument("scale factor must be positive and finite");
    auto entries = entries_;
    for (auto& e : entries) e.value *= factor;
    CoocMatrix out(vocab_size_, window_radius_, std::move(entries), vocab_hash_);
    out.corpus_id_ = corpus_id_;
    return out;
}

CoocMatrix CoocMatrix::restrict_to(const Vocabulary& from, const Vocabulary& to) const {
    if (from.size() != vocab_size_)
        throw InvariantError("restrict_to: source vocabulary does not match matrix size");
    std::vector<WordId> remap(from.size(), kNoWord);
    for (WordId t = 0; t < to.size(); ++t) {
        auto f = from.find(to.word(t));
        if (!f) throw InvariantError("restrict_to: word '" + to.word(t) + "' not in source vocabulary");
        remap[*f] = t;
    }
    std::vector<SymEntry<double>> entries;
    for (const auto& e : entries_) {
        WordId a = remap[e.i], b = remap[e.j];
        if (a == kNoWord || b == kNoWord) continue;
        if (a > b) std::swap(a, b);
        entries.push_back({a, b, e.value});
    }
    std::sort(entries.begin(), entries.end(), entry_less<double>);
    CoocMatrix out(to.size(), window_radius_, std::move(entries), to.hash());
    out.corpus_id_ = corpus_id_;
    return out;
}

void CoocMatrix::save(std::ostream& out) const {
    out << "COOCv1\t" << vocab_size_ << '\t' << entries_.size() << '\t' << window_radius_ << '\n';
    for (const auto& e : entries_) out << e.i << '\t' << e.j << '\t' << format_exact(e.value) << '\n';
}

void CoocMatrix::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write cooccurrence matrix: " + path);
    save(out);
    if (!out) throw DataError("write failed: " + path);
}

CoocMatrix CoocMatrix::load(std::istream& in, const Vocabulary& vocab, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError(name, 1, "missing COOCv1 header");
    auto header = split(line, '\t');
    std::uint64_t v = 0, nnz = 0, radius = 0;
    if (header.size() != 4 || header[0] != "COOCv1" || !parse_uint(header[1], v) ||
        !parse_uint(header[2], nnz) || !parse_uint(header[3], radius) || radius < 1 ||
        radius > UINT32_MAX)
        throw FormatError(name, 1, "expected header 'COOCv1\\t<V>\\t<nnz>\\t<window_radius>'");
    if (v != vocab.size())
        throw FormatError(name, 1, "matrix size " + std::to_string(v) +
                                       " does not match vocabulary size " +
                                       std::to_string(vocab.size()));
    std::vector<SymEntry<double>> entries;
    entries.reserve(nnz);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto f = split(line, '\t');
        std::uint64_t i = 0, j = 0;
        double value = 0;
        if (f.size() != 3 || !parse_uint(f[0], i) || !parse_uint(f[1], j) || !parse_double(f[2], value))
            throw FormatError(name, lineno, "expected '<i>\\t<j>\\t<value>'");
        if (i > j) throw FormatError(name, lineno, "entry not canonical (i > j)");
        if (j >= v) throw FormatError(name, lineno, "index out of range");
        if (!(value > 0) || !std::isfinite(value)) throw FormatError(name, lineno, "value must be positive and finite");
        SymEntry<double> e{static_cast<WordId>(i), static_cast<WordId>(j), value};
        if (!entries.empty() && !entry_less(entries.back(), e))
            throw FormatError(name, lineno, "entries not strictly increasing in (i, j)");
        entries.push_back(e);
    }
    if (entries.size() != nnz)
        throw FormatError(name, lineno, "header declares " + std::to_string(nnz) +
                                            " entries, found " + std::to_string(entries.size()));
    return CoocMatrix(v, static_cast<std::uint32_t>(radius), std::move(entries), vocab.hash());
}

CoocMatrix CoocMatrix::load(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open cooccurrence matrix: " + path);
    CoocMatrix m = load(in, vocab, path);
    m.corpus_id_ = path;
    return m;
}

CoocMatrix normalize(const RawCoocCounts& raw, const Vocabulary& vocab) {
    if (raw.vocab_size() != vocab.size())
        throw InvariantError("normalize: counts and vocabulary sizes differ");
    std::vector<SymEntry<double>> entries;
    entries.reserve(raw.nnz());
    for (const auto& e : raw.entries()) {
        std::uint64_t fi = vocab.freq(e.i), fj = vocab.freq(e.j);
        if (fi == 0 || fj == 0)
            throw InvariantError("normalize: zero frequency for word '" +
                                 vocab.word(fi == 0 ? e.i : e.j) + "'");
        entries.push_back({e.i, e.j, static_cast<double>(e.value) /
                                         (static_cast<double>(fi) * static_cast<double>(fj))});
    }
    return CoocMatrix(vocab.size(), raw.window_radius(), std::move(entries), vocab.hash());
}

}  // namespace ctxemb
