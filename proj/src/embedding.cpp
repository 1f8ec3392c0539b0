#include "ctxemb/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace ctxemb {

double l2_norm(std::span<const double> v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    return std::sqrt(sq);
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::vector<double> data, std::uint64_t vocab_hash)
    : dim_(dim), data_(std::move(data)), vocab_hash_(vocab_hash) {
    if (dim_ == 0) throw InvariantError("embedding dimension must be positive");
    if (data_.size() % dim_ != 0) throw InvariantError("embedding data is not a multiple of dim");
}

EmbeddingMatrix EmbeddingMatrix::scaled(double factor) const {
    auto data = data_;
    for (double& x : data) x *= factor;
    return EmbeddingMatrix(dim_, std::move(data), vocab_hash_);
}

void EmbeddingMatrix::save(std::ostream& out, const Vocabulary& vocab) const {
    if (vocab.size() != vocab_size()) throw InvariantError("save: vocabulary size mismatch");
    out << vocab_size() << ' ' << dim_ << '\n';
    for (WordId w = 0; w < vocab_size(); ++w) {
        out << vocab.word(w);
        for (double x : vector(w)) out << ' ' << format_exact(x);
        out << '\n';
    }
}

void EmbeddingMatrix::save(const std::string& path, const Vocabulary& vocab) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write embeddings: " + path);
    save(out, vocab);
    if (!out) throw DataError("write failed: " + path);
}

LoadedEmbeddings load_embeddings(std::istream& in, const Vocabulary& vocab, const std::string& name) {
    std::size_t dim = 0;
    std::size_t declared_dim = 0;
    std::vector<std::vector<double>> found(vocab.size());
    std::vector<std::size_t> found_line(vocab.size(), 0);
    LoadedEmbeddings result;

    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (first) {
            first = false;
            std::uint64_t a = 0, b = 0;
            if (fields.size() == 2 && parse_uint(fields[0], a) && parse_uint(fields[1], b)) {
                if (b == 0) throw FormatError(name, lineno, "header declares dimension 0");
                declared_dim = b;
                continue;
            }
        }
        if (fields.size() < 2) throw FormatError(name, lineno, "expected 'word v1 ... vd'");
        std::size_t d = fields.size() - 1;
        if (dim == 0) {
            dim = d;
            if (declared_dim != 0 && declared_dim != dim)
                throw FormatError(name, lineno, "dimension " + std::to_string(dim) +
                                                    " disagrees with header dimension " +
                                                    std::to_string(declared_dim));
        } else if (d != dim) {
            throw FormatError(name, lineno, "dimension " + std::to_string(d) + ", expected " +
                                                std::to_string(dim));
        }
        ++result.records;
        std::vector<double> vec(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            if (!parse_double(fields[k + 1], vec[k]) || !std::isfinite(vec[k]))
                throw FormatError(name, lineno, "bad vector component '" +
                                                    std::string(fields[k + 1]) + "'");
        }
        auto id = vocab.find(fields[0]);
        if (!id) {
            ++result.unmatched;
            continue;
        }
        if (found_line[*id] != 0)
            throw FormatError(name, lineno, "duplicate word '" + std::string(fields[0]) +
                                                "' (first on line " +
                                                std::to_string(found_line[*id]) + ")");
        found[*id] = std::move(vec);
        found_line[*id] = lineno;
    }

    result.vocab = vocab.filter([&](WordId w) { return found_line[w] != 0; });
    if (result.vocab.empty())
        throw DataError("no vocabulary word has a vector in " + name);
    std::vector<double> data;
    data.reserve(result.vocab.size() * dim);
    for (WordId w = 0; w < vocab.size(); ++w)
        if (found_line[w] != 0) data.insert(data.end(), found[w].begin(), found[w].end());
    result.matrix = EmbeddingMatrix(dim, std::move(data), result.vocab.hash());
    return result;
}

LoadedEmbeddings load_embeddings(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open embeddings: " + path);
    return load_embeddings(in, vocab, path);
}

Model::Model(Vocabulary vocab, CoocMatrix cooc, EmbeddingMatrix base)
    : vocab_(std::move(vocab)), cooc_(std::move(cooc)), base_(std::move(base)) {
    if (cooc_.vocab_size() != vocab_.size() || base_.vocab_size() != vocab_.size())
        throw InvariantError("vocabulary mismatch: V=" + std::to_string(vocab_.size()) +
                             ", W is " + std::to_string(cooc_.vocab_size()) + ", C has " +
                             std::to_string(base_.vocab_size()) + " vectors");
    const auto h = vocab_.hash();
    if ((cooc_.vocab_hash() != 0 && cooc_.vocab_hash() != h) ||
        (base_.vocab_hash() != 0 && base_.vocab_hash() != h))
        throw InvariantError("vocabulary mismatch: W or C was built over a different vocabulary");
}

std::vector<WordId> Model::resolve(const Context& ctx, WordId target) const {
    std::vector<WordId> ids;
    ids.reserve(ctx.words.size());
    for (const auto& w : ctx.words) {
        auto id = vocab_.find(w);
        if (!id) continue;
        if (!ctx.include_target && *id == target) continue;
        ids.push_back(*id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

Model Model::with_scaled_cooc(double factor) const {
    return Model(vocab_, cooc_.scaled(factor), base_);
}

Model load_model(const std::string& vocab_path, const std::string& cooc_path,
                 const std::string& embeddings_path) {
    Vocabulary full = Vocabulary::load(vocab_path);
    CoocMatrix cooc = CoocMatrix::load(cooc_path, full);
    LoadedEmbeddings emb = load_embeddings(embeddings_path, full);
    CoocMatrix restricted = cooc.restrict_to(full, emb.vocab);
    return Model(std::move(emb.vocab), std::move(restricted), std::move(emb.matrix));
}

ContextualEmbedding contextual_embedding(WordId target, std::span<const WordId> context,
                                         const CoocMatrix& cooc, const EmbeddingMatrix& base) {
    if (cooc.vocab_size() != base.vocab_size())
        throw InvariantError("vocabulary mismatch between W and C");
    if (target >= cooc.vocab_size()) throw std::out_of_range("target index out of range");
    ContextualEmbedding out;
    out.target = target;
    out.context_size = context.size();
    out.vector.assign(base.dim(), 0.0);
    if (context.empty()) return out;
    for (WordId j : context) {
        double weight = cooc.at(j, target);
        if (weight == 0.0) continue;
        auto cj = base.vector(j);
        for (std::size_t k = 0; k < cj.size(); ++k) out.vector[k] += weight * cj[k];
    }
    const double n = static_cast<double>(context.size());
    for (double& x : out.vector) x /= n;
    out.norm = l2_norm(out.vector);
    return out;
}

ContextualEmbedding contextual_embedding(const Model& model, WordId target, const Context& ctx) {
    auto ids = model.resolve(ctx, target);
    return contextual_embedding(target, ids, model.cooc(), model.base());
}

double relevance_score(const Model& model, WordId target, const Context& ctx) {
    Context excluded{ctx.words, false};
    return contextual_embedding(model, target, excluded).norm;
}

std::vector<double> phrase_embedding(const Model& model, const std::vector<std::string>& phrase) {
    Context ctx{phrase, true};
    std::vector<double> mean(model.dim(), 0.0);
    std::size_t count = 0;
    for (const auto& w : phrase) {
        auto id = model.vocab().find(w);
        if (!id) continue;
        auto u = contextual_embedding(model, *id, ctx);
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += u.vector[k];
        ++count;
    }
    if (count == 0) throw DataError("phrase has no in-vocabulary word");
    for (double& x : mean) x /= static_cast<double>(count);
    return mean;
}

std::vector<ScoredWord> top_norm_words(const Model& model, const Context& ctx, std::size_t k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    const std::size_t V = model.vocab().size();
    const std::size_t d = model.dim();

    // Context ids with the target rule deferred: when the target is excluded
    // each candidate drops its own occurrences.
    Context all{ctx.words, true};
    const auto ids = model.resolve(all, 0);
    std::unordered_map<WordId, std::size_t> multiplicity;
    for (WordId j : ids) ++multiplicity[j];

    // Accumulate sum_j W[j][w] C_j for every w reachable from a context row,
    // visiting j ascending so each sum matches contextual_embedding exactly.
    std::unordered_map<WordId, std::size_t> slot;
    std::vector<WordId> touched;
    std::vector<double> acc;
    for (WordId j : ids) {
        auto cj = model.base().vector(j);
        for (const auto& cell : model.cooc().row(j)) {
            if (!ctx.include_target && cell.col == j) continue;
            auto [it, fresh] = slot.emplace(cell.col, touched.size());
            if (fresh) {
                touched.push_back(cell.col);
                acc.resize(acc.size() + d, 0.0);
            }
            double* sum = acc.data() + it->second * d;
            for (std::size_t c = 0; c < d; ++c) sum[c] += cell.value * cj[c];
        }
    }

    std::vector<ScoredWord> scored(V);
    for (WordId w = 0; w < V; ++w) scored[w] = {w, 0.0};
    std::vector<double> u(d);
    for (std::size_t t = 0; t < touched.size(); ++t) {
        WordId w = touched[t];
        std::size_t n = ids.size();
        if (!ctx.include_target) {
            auto m = multiplicity.find(w);
            if (m != multiplicity.end()) n -= m->second;
        }
        if (n == 0) continue;
        const double* sum = acc.data() + t * d;
        for (std::size_t c = 0; c < d; ++c) u[c] = sum[c] / static_cast<double>(n);
        scored[w].score = l2_norm(u);
    }
    k = std::min(k, V);
    auto better = [](const ScoredWord& a, const ScoredWord& b) {
        return a.score != b.score ? a.score > b.score : a.word < b.word;
    };
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), better);
    scored.resize(k);
    return scored;
}

}  // namespace ctxemb
