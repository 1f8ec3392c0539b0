#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ctxemb {

// Predicted scores with parallel labels (0/1 for the ranking metrics).
struct ScoredLabels {
    std::vector<double> scores;
    std::vector<double> labels;
};

// Fractional ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of average ranks. Throws UndefinedMetric when either
// list is constant.
double spearman(std::span<const double> pred, std::span<const double> gold);

// Fraction of tests whose positive strictly outscores every negative. Each
// test needs exactly one positive; ties at the top count as misses.
double precision_at_1(const std::vector<ScoredLabels>& tests);

// P(pos > neg) + 0.5 P(pos == neg) over all positive/negative pairs.
double roc_auc(const ScoredLabels& data);

// Mean of precision at each positive's rank, scanning scores in descending
// order with ties kept in input order.
double average_precision(const ScoredLabels& data);

struct LabeledVector {
    std::vector<double> vector;
    std::size_t label;
};

// Majority label among the K nearest training vectors (Euclidean). Distance
// ties go to the lower training index; vote ties to the label whose member
// appears first among the neighbours.
std::size_t knn_classify(std::span<const LabeledVector> train, std::span<const double> query,
                         std::size_t k);

}  // namespace ctxemb
