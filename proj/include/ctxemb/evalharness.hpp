#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ctxemb/embedding.hpp"
#include "ctxemb/similarity.hpp"

namespace ctxemb {

// ---- datasets -------------------------------------------------------------

struct WordInContext {
    std::string word;
    std::vector<std::string> context;
};

struct WcrItem {
    WordInContext pair;
    int label = 0;
};

// One word-context relevance test: exactly one relevant pair and m >= 1
// irrelevant ones.
struct WcrTest {
    std::string id;
    std::vector<WcrItem> items;
    std::size_t negatives() const { return items.size() - 1; }
};

struct CwsTest {
    std::string id;
    WordInContext query;
    std::vector<WordInContext> positives;
    std::vector<WordInContext> negatives;
};

struct ScwsTest {
    std::string id;
    WordInContext first;
    WordInContext second;
    double gold = 0.0;
};

struct WscExample {
    std::string sense;
    std::string word;
    std::vector<std::string> sentence;
};

// Tab-separated loaders. The first line must name the schema (WCRv1, CWSv1,
// SCWSv1, WSCv1). Malformed input throws FormatError with the 1-based line.
std::vector<WcrTest> load_wcr(std::istream& in, const std::string& name = "<stream>");
std::vector<CwsTest> load_cws(std::istream& in, const std::string& name = "<stream>");
std::vector<ScwsTest> load_scws(std::istream& in, const std::string& name = "<stream>");
std::vector<WscExample> load_wsc(std::istream& in, const std::string& name = "<stream>");

std::vector<WcrTest> load_wcr(const std::string& path);
std::vector<CwsTest> load_cws(const std::string& path);
std::vector<ScwsTest> load_scws(const std::string& path);
std::vector<WscExample> load_wsc(const std::string& path);

// ---- evaluations ----------------------------------------------------------

struct WcrResult {
    std::optional<double> spearman;  // mean over tests with a defined correlation
    double precision_at_1 = 0.0;     // mean over all evaluated tests
    std::size_t tests = 0;
    std::size_t evaluated = 0;
    std::size_t skipped_oov = 0;        // target (or every negative) out of vocabulary
    std::size_t skipped_spearman = 0;   // all scores tied
    std::size_t dropped_items = 0;      // OOV-word negatives removed
};

struct CwsResult {
    double auc = 0.0;
    double average_precision = 0.0;
    std::size_t tests = 0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;        // query OOV or a candidate side emptied
    std::size_t dropped_items = 0;  // OOV candidates removed
};

struct ScwsResult {
    double spearman = 0.0;
    std::size_t tests = 0;
    std::size_t retained = 0;
    std::size_t skipped_oov = 0;
};

struct WscWordResult {
    std::string word;
    std::size_t senses = 0;
    std::size_t train = 0;
    std::size_t test = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
};

struct WscResult {
    double accuracy = 0.0;  // unweighted mean over evaluated words
    std::vector<WscWordResult> words;
    std::size_t words_total = 0;
    std::size_t excluded_single_sense = 0;
    std::size_t skipped_knn = 0;  // K exceeded the word's training set
    std::vector<std::string> errors;
    std::size_t dropped_oov_examples = 0;
    std::size_t dropped_rare_examples = 0;
};

struct WscOptions {
    std::size_t k = 5;
    double split_fraction = 0.8;
    std::uint64_t seed = 1;
    std::size_t min_sense_examples = 10;
};

WcrResult eval_wcr(const std::vector<WcrTest>& tests, const Model& model, std::size_t threads = 1);
CwsResult eval_cws(const std::vector<CwsTest>& tests, const Model& model, std::size_t threads = 1);
ScwsResult eval_scws(const std::vector<ScwsTest>& tests, const Model& model, std::size_t threads = 1);
WscResult eval_wsc(const std::vector<WscExample>& examples, const Model& model,
                   const WscOptions& options, std::size_t threads = 1);

// Contextual embeddings of both sides of every in-vocabulary SCWS test,
// paired with the gold score (input to alpha_sweep).
std::vector<ScoredPair> scws_pairs(const std::vector<ScwsTest>& tests, const Model& model);

// Relevance norm of every in-vocabulary WCR pair: (test id, label, word, norm).
struct WcrNorm {
    std::string test;
    int label;
    std::string word;
    double norm;
};
std::vector<WcrNorm> wcr_norms(const std::vector<WcrTest>& tests, const Model& model);

// Stratified split: per sense, indices are shuffled with a generator seeded
// from (seed, word) and the first round(fraction * n) (clamped to [1, n-1])
// go to training. Returns (train, test) index lists into `labels`.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const std::vector<std::size_t>& labels, double fraction, std::uint64_t seed,
    const std::string& word);

}  // namespace ctxemb
