#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctxemb/common.hpp"
#include "ctxemb/cooccurrence.hpp"
#include "ctxemb/corpus.hpp"

namespace ctxemb {

// Dense base vectors, one row of length dim() per vocabulary index.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::size_t dim, std::vector<double> data, std::uint64_t vocab_hash = 0);

    std::size_t dim() const { return dim_; }
    std::size_t vocab_size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
    std::uint64_t vocab_hash() const { return vocab_hash_; }

    std::span<const double> vector(WordId id) const {
        return {data_.data() + static_cast<std::size_t>(id) * dim_, dim_};
    }

    EmbeddingMatrix scaled(double factor) const;

    // Plain-text vector format with a "<V> <d>" header line.
    void save(std::ostream& out, const Vocabulary& vocab) const;
    void save(const std::string& path, const Vocabulary& vocab) const;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
    std::uint64_t vocab_hash_ = 0;
};

struct LoadedEmbeddings {
    EmbeddingMatrix matrix;
    // `vocab` restricted to words that have a vector, order preserved.
    Vocabulary vocab;
    std::size_t records = 0;   // vector records in the file
    std::size_t unmatched = 0; // records whose word is not in vocab
};

// Reads "word v1 ... vd" records (optional "<V> <d>" header). The dimension
// comes from the first record and is enforced on the rest. Throws FormatError
// naming the offending line, DataError on an empty intersection.
LoadedEmbeddings load_embeddings(std::istream& in, const Vocabulary& vocab,
                                 const std::string& name = "<stream>");
LoadedEmbeddings load_embeddings(const std::string& path, const Vocabulary& vocab);

// A multiset of context tokens. include_target = false removes every
// occurrence of the target word before the context size is taken.
struct Context {
    std::vector<std::string> words;
    bool include_target = true;
};

struct ContextualEmbedding {
    std::vector<double> vector;
    double norm = 0.0;
    WordId target = 0;
    std::size_t context_size = 0;  // retained in-vocabulary tokens
};

// A vocabulary with its co-occurrence matrix and base vectors, checked to
// agree on size and vocabulary hash.
class Model {
public:
    Model(Vocabulary vocab, CoocMatrix cooc, EmbeddingMatrix base);

    const Vocabulary& vocab() const { return vocab_; }
    const CoocMatrix& cooc() const { return cooc_; }
    const EmbeddingMatrix& base() const { return base_; }
    std::size_t dim() const { return base_.dim(); }

    // In-vocabulary ids of ctx, sorted ascending, duplicates kept; the target
    // is dropped when ctx.include_target is false.
    std::vector<WordId> resolve(const Context& ctx, WordId target) const;

    // Same model with W multiplied by factor.
    Model with_scaled_cooc(double factor) const;

private:
    Vocabulary vocab_;
    CoocMatrix cooc_;
    EmbeddingMatrix base_;
};

// Reads vocabulary, matrix and vectors, then restricts everything to the words
// that have a base vector.
Model load_model(const std::string& vocab_path, const std::string& cooc_path,
                 const std::string& embeddings_path);

// u = (1/|S|) sum_j W[j][target] C_j over the given (ascending) context ids.
// An empty context yields the zero vector.
ContextualEmbedding contextual_embedding(WordId target, std::span<const WordId> context,
                                         const CoocMatrix& cooc, const EmbeddingMatrix& base);

ContextualEmbedding contextual_embedding(const Model& model, WordId target, const Context& ctx);

// Norm of the contextual embedding with the target excluded from ctx.
double relevance_score(const Model& model, WordId target, const Context& ctx);

// Mean over in-vocabulary phrase tokens w of the embedding of w with the
// whole phrase as context. Throws DataError if no token is in vocabulary.
std::vector<double> phrase_embedding(const Model& model, const std::vector<std::string>& phrase);

struct ScoredWord {
    WordId word;
    double score;

    bool operator==(const ScoredWord&) const = default;
};

// The k vocabulary words whose contextual embedding under ctx has the largest
// norm; ties go to the lower index.
std::vector<ScoredWord> top_norm_words(const Model& model, const Context& ctx, std::size_t k);

double l2_norm(std::span<const double> v);

}  // namespace ctxemb
