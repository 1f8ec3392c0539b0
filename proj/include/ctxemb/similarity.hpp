#pragma once

#include <span>
#include <unordered_set>
#include <vector>

#include "ctxemb/embedding.hpp"

namespace ctxemb {

// Geometric blend of cosine and dot product. With s = x.y and
// c = s / (|x| |y|) returns sign(s) |c|^alpha |s|^(1 - alpha); exactly c at
// alpha = 1, exactly s at alpha = 0, and 0 when either vector is zero.
double alpha_similarity(std::span<const double> x, std::span<const double> y, double alpha);

double dot(std::span<const double> x, std::span<const double> y);
double cosine(std::span<const double> x, std::span<const double> y);

// Top-k base vectors by alpha_similarity against query, ties to the lower
// index. Throws std::invalid_argument for a zero query at alpha = 1.
std::vector<ScoredWord> nearest_words(std::span<const double> query, const EmbeddingMatrix& base,
                                      double alpha, std::size_t k,
                                      const std::unordered_set<WordId>& exclude = {});

struct ScoredPair {
    std::vector<double> x;
    std::vector<double> y;
    double gold;
};

struct SweepPoint {
    double alpha;
    double spearman;
};

// Spearman of alpha_similarity scores against gold for each alpha.
std::vector<SweepPoint> alpha_sweep(const std::vector<ScoredPair>& pairs,
                                    const std::vector<double>& alphas);

}  // namespace ctxemb
