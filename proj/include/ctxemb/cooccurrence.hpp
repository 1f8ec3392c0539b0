#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ctxemb/common.hpp"
#include "ctxemb/corpus.hpp"

namespace ctxemb {

// One canonical (i <= j) cell of a symmetric matrix.
template <typename T>
struct SymEntry {
    WordId i;
    WordId j;
    T value;

    bool operator==(const SymEntry&) const = default;
};

// Window co-occurrence counts, stored upper-triangular and sorted by (i, j).
class RawCoocCounts {
public:
    RawCoocCounts() = default;
    RawCoocCounts(std::size_t vocab_size, std::uint32_t window_radius,
                  std::vector<SymEntry<std::uint64_t>> entries);

    std::size_t vocab_size() const { return vocab_size_; }
    std::uint32_t window_radius() const { return window_radius_; }
    std::size_t nnz() const { return entries_.size(); }
    std::span<const SymEntry<std::uint64_t>> entries() const { return entries_; }

    // Count for an unordered pair; 0 when absent.
    std::uint64_t count(WordId a, WordId b) const;

    // Sums counts; sizes and radii must agree.
    void merge(const RawCoocCounts& other);

    bool operator==(const RawCoocCounts&) const = default;

private:
    std::size_t vocab_size_ = 0;
    std::uint32_t window_radius_ = 1;
    std::vector<SymEntry<std::uint64_t>> entries_;
};

// Vocabulary ids per stream position; out-of-vocabulary positions are kNoWord.
inline constexpr WordId kNoWord = static_cast<WordId>(-1);
std::vector<WordId> encode(const TokenStream& stream, const Vocabulary& vocab);

// Counts every position pair (p, q), 0 < q - p <= window_radius, that is not
// separated by a boundary and has both tokens in vocab. The stream is sharded
// by start position across `threads`; shards may read past their end so the
// result never depends on the thread count.
RawCoocCounts count_cooccurrences(const TokenStream& stream, const Vocabulary& vocab,
                                  std::uint32_t window_radius, std::size_t threads = 1);

// Normalized co-occurrence matrix: count(i, j) / (freq_i * freq_j).
// Canonical entries are kept for serialization; a full symmetric CSR copy
// serves row queries.
class CoocMatrix {
public:
    struct Cell {
        WordId col;
        double value;
    };

    CoocMatrix() = default;
    CoocMatrix(std::size_t vocab_size, std::uint32_t window_radius,
               std::vector<SymEntry<double>> entries, std::uint64_t vocab_hash = 0);

    std::size_t vocab_size() const { return vocab_size_; }
    std::size_t nnz() const { return entries_.size(); }
    std::uint32_t window_radius() const { return window_radius_; }
    std::uint64_t vocab_hash() const { return vocab_hash_; }
    const std::string& corpus_id() const { return corpus_id_; }
    void set_corpus_id(std::string id) { corpus_id_ = std::move(id); }

    std::span<const SymEntry<double>> entries() const { return entries_; }

    // All nonzero (j, W[i][j]) pairs of row i, ascending j.
    std::span<const Cell> row(WordId i) const;

    // W[i][j]; 0 when unstored.
    double at(WordId i, WordId j) const;

    // Every stored value multiplied by factor (> 0).
    CoocMatrix scaled(double factor) const;

    // Submatrix over `to`, whose words must all appear in `from` (the
    // vocabulary this matrix was built over). Values are carried over as is.
    CoocMatrix restrict_to(const Vocabulary& from, const Vocabulary& to) const;

    void save(std::ostream& out) const;
    void save(const std::string& path) const;
    // Validates the header, strictly increasing (i, j), i <= j < V, value > 0
    // and V against the paired vocabulary.
    static CoocMatrix load(std::istream& in, const Vocabulary& vocab,
                           const std::string& name = "<stream>");
    static CoocMatrix load(const std::string& path, const Vocabulary& vocab);

private:
    void build_rows();

    std::size_t vocab_size_ = 0;
    std::uint32_t window_radius_ = 1;
    std::uint64_t vocab_hash_ = 0;
    std::string corpus_id_;
    std::vector<SymEntry<double>> entries_;
    std::vector<std::size_t> row_ptr_;
    std::vector<Cell> cells_;
};

// Throws InvariantError if a referenced word has zero frequency or the
// vocabulary size disagrees with the counts.
CoocMatrix normalize(const RawCoocCounts& raw, const Vocabulary& vocab);

}  // namespace ctxemb
