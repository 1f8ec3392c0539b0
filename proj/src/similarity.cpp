#include "ctxemb/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ctxemb/metrics.hpp"

namespace ctxemb {

namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
}

void check_pair(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()));
    for (std::size_t k = 0; k < x.size(); ++k)
        if (std::isnan(x[k]) || std::isnan(y[k])) throw std::invalid_argument("NaN in similarity input");
}

double blend(double s, double nx, double ny, double alpha) {
    if (nx == 0.0 || ny == 0.0 || s == 0.0) return 0.0;
    double c = s / (nx * ny);
    if (alpha == 1.0) return c;
    if (alpha == 0.0) return s;
    double magnitude = std::pow(std::fabs(c), alpha) * std::pow(std::fabs(s), 1.0 - alpha);
    return s < 0 ? -magnitude : magnitude;
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
    return s;
}

double cosine(std::span<const double> x, std::span<const double> y) {
    return alpha_similarity(x, y, 1.0);
}

double alpha_similarity(std::span<const double> x, std::span<const double> y, double alpha) {
    check_alpha(alpha);
    check_pair(x, y);
    return blend(dot(x, y), l2_norm(x), l2_norm(y), alpha);
}

std::vector<ScoredWord> nearest_words(std::span<const double> query, const EmbeddingMatrix& base,
                                      double alpha, std::size_t k,
                                      const std::unordered_set<WordId>& exclude) {
    check_alpha(alpha);
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (query.size() != base.dim())
        throw std::invalid_argument("query dimension " + std::to_string(query.size()) +
                                    " does not match embedding dimension " +
                                    std::to_string(base.dim()));
    const double qnorm = l2_norm(query);
    if (std::isnan(qnorm)) throw std::invalid_argument("NaN in query");
    if (qnorm == 0.0 && alpha == 1.0)
        throw std::invalid_argument("cosine of zero vector undefined");

    std::vector<ScoredWord> scored;
    scored.reserve(base.vocab_size());
    for (WordId w = 0; w < base.vocab_size(); ++w) {
        if (exclude.count(w)) continue;
        auto v = base.vector(w);
        scored.push_back({w, blend(dot(query, v), qnorm, l2_norm(v), alpha)});
    }
    k = std::min(k, scored.size());
    auto better = [](const ScoredWord& a, const ScoredWord& b) {
        return a.score != b.score ? a.score > b.score : a.word < b.word;
    };
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), better);
    scored.resize(k);
    return scored;
}

std::vector<SweepPoint> alpha_sweep(const std::vector<ScoredPair>& pairs,
                                    const std::vector<double>& alphas) {
    if (pairs.size() < 2) throw std::invalid_argument("alpha sweep needs at least 2 pairs");
    std::vector<double> gold;
    gold.reserve(pairs.size());
    for (const auto& p : pairs) gold.push_back(p.gold);
    std::vector<SweepPoint> out;
    for (double alpha : alphas) {
        check_alpha(alpha);
        std::vector<double> pred;
        pred.reserve(pairs.size());
        for (const auto& p : pairs) pred.push_back(alpha_similarity(p.x, p.y, alpha));
        out.push_back({alpha, spearman(pred, gold)});
    }
    return out;
}

}  // namespace ctxemb
