#include "ctxemb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ctxemb/common.hpp"

namespace ctxemb {

namespace {

void check_labels(const ScoredLabels& data) {
    if (data.scores.size() != data.labels.size())
        throw std::invalid_argument("scores and labels differ in length");
    if (data.scores.empty()) throw std::invalid_argument("empty scored-label list");
    for (double l : data.labels)
        if (l != 0.0 && l != 1.0) throw std::invalid_argument("labels must be 0 or 1");
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share rank mean((i+1)..(j+1))
        double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> pred, std::span<const double> gold) {
    if (pred.size() != gold.size()) throw std::invalid_argument("spearman: length mismatch");
    if (pred.size() < 2) throw UndefinedMetric("spearman needs at least 2 samples");
    for (std::size_t k = 0; k < pred.size(); ++k)
        if (std::isnan(pred[k]) || std::isnan(gold[k])) throw std::invalid_argument("spearman: NaN input");
    auto rp = average_ranks(pred);
    auto rg = average_ranks(gold);
    const double n = static_cast<double>(rp.size());
    const double mean = (n + 1.0) / 2.0;  // mean of any fractional ranking
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < rp.size(); ++k) {
        double a = rp[k] - mean, b = rg[k] - mean;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if (sxx == 0.0 || syy == 0.0) throw UndefinedMetric("undefined correlation: constant input");
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

double precision_at_1(const std::vector<ScoredLabels>& tests) {
    if (tests.empty()) throw std::invalid_argument("precision_at_1: no tests");
    std::size_t hits = 0;
    for (std::size_t t = 0; t < tests.size(); ++t) {
        const auto& test = tests[t];
        check_labels(test);
        std::size_t positives = 0, pos = 0;
        for (std::size_t k = 0; k < test.labels.size(); ++k)
            if (test.labels[k] == 1.0) {
                ++positives;
                pos = k;
            }
        if (positives != 1)
            throw DataError("precision_at_1: test " + std::to_string(t) + " has " +
                            std::to_string(positives) + " positives, expected 1");
        bool strict = true;
        for (std::size_t k = 0; k < test.scores.size(); ++k)
            if (k != pos && !(test.scores[pos] > test.scores[k])) strict = false;
        if (strict) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(tests.size());
}

double roc_auc(const ScoredLabels& data) {
    check_labels(data);
    auto ranks = average_ranks(data.scores);
    double pos = 0, rank_sum = 0;
    for (std::size_t k = 0; k < ranks.size(); ++k)
        if (data.labels[k] == 1.0) {
            pos += 1;
            rank_sum += ranks[k];
        }
    double neg = static_cast<double>(ranks.size()) - pos;
    if (pos == 0 || neg == 0) throw UndefinedMetric("roc_auc needs both classes");
    return (rank_sum - pos * (pos + 1) / 2) / (pos * neg);
}

double average_precision(const ScoredLabels& data) {
    check_labels(data);
    std::vector<std::size_t> order(data.scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return data.scores[a] > data.scores[b]; });
    double hits = 0, sum = 0;
    for (std::size_t r = 0; r < order.size(); ++r)
        if (data.labels[order[r]] == 1.0) {
            hits += 1;
            sum += hits / static_cast<double>(r + 1);
        }
    if (hits == 0) throw UndefinedMetric("average_precision needs a positive");
    return sum / hits;
}

std::size_t knn_classify(std::span<const LabeledVector> train, std::span<const double> query,
                         std::size_t k) {
    if (train.empty()) throw std::invalid_argument("knn_classify: empty training set");
    if (k < 1 || k > train.size())
        throw std::invalid_argument("knn_classify: K=" + std::to_string(k) +
                                    " outside [1, " + std::to_string(train.size()) + "]");
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(train.size());
    for (std::size_t t = 0; t < train.size(); ++t) {
        const auto& v = train[t].vector;
        if (v.size() != query.size()) throw std::invalid_argument("knn_classify: dimension mismatch");
        double sq = 0;
        for (std::size_t c = 0; c < v.size(); ++c) {
            double diff = v[c] - query[c];
            sq += diff * diff;
        }
        dist.emplace_back(sq, t);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

    // (label, votes, first neighbour rank)
    struct Tally {
        std::size_t label, votes, first;
    };
    std::vector<Tally> tally;
    for (std::size_t r = 0; r < k; ++r) {
        std::size_t label = train[dist[r].second].label;
        auto it = std::find_if(tally.begin(), tally.end(), [&](const Tally& t) { return t.label == label; });
        if (it == tally.end())
            tally.push_back({label, 1, r});
        else
            ++it->votes;
    }
    // tally is already ordered by first appearance, so the first maximum wins
    const Tally* best = &tally.front();
    for (const auto& t : tally)
        if (t.votes > best->votes) best = &t;
    return best->label;
}

}  // namespace ctxemb
