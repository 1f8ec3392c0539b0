#include "ctxemb/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <random>
#include <unordered_map>

#include "ctxemb/metrics.hpp"

namespace ctxemb {

namespace {

// Line reader that tracks 1-based line numbers and checks the schema header.
class SchemaReader {
public:
    SchemaReader(std::istream& in, std::string name, std::string_view schema)
        : in_(in), name_(std::move(name)) {
        std::string header;
        if (!next(header) || header != schema)
            fail("expected header '" + std::string(schema) + "'");
    }

    bool next(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }

    // Tab fields of the current line; exactly `count` required.
    std::vector<std::string_view> fields(const std::string& line, std::size_t count,
                                         const char* layout) {
        if (line.empty()) fail("empty line");
        auto f = split(line, '\t');
        if (f.size() != count)
            fail("expected " + std::to_string(count) + " tab-separated fields (" + layout +
                 "), found " + std::to_string(f.size()));
        return f;
    }

    std::string word(std::string_view field, const char* what) {
        if (field.empty()) fail(std::string("empty ") + what);
        if (split_ws(field).size() != 1) fail(std::string(what) + " must be a single token");
        return std::string(field);
    }

    std::vector<std::string> words(std::string_view field, const char* what) {
        auto parts = split_ws(field);
        if (parts.empty()) fail(std::string("empty ") + what);
        return {parts.begin(), parts.end()};
    }

    [[noreturn]] void fail(const std::string& what) const { throw FormatError(name_, line_, what); }
    [[noreturn]] void fail_at(std::size_t line, const std::string& what) const {
        throw FormatError(name_, line, what);
    }
    std::size_t line() const { return line_; }

private:
    std::istream& in_;
    std::string name_;
    std::size_t line_ = 0;
};

template <typename T>
std::vector<T> load_path(const std::string& path,
                         std::vector<T> (*loader)(std::istream&, const std::string&)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset: " + path);
    return loader(in, path);
}

// Index of `id` in `order`, appending it when new.
std::size_t group_index(std::unordered_map<std::string, std::size_t>& groups, const std::string& id,
                        std::size_t next) {
    return groups.emplace(id, next).first->second;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<double> embed(const Model& model, const WordInContext& wc) {
    WordId target = model.vocab().at(wc.word);
    return contextual_embedding(model, target, Context{wc.context, true}).vector;
}

}  // namespace

std::vector<WcrTest> load_wcr(std::istream& in, const std::string& name) {
    SchemaReader r(in, name, "WCRv1");
    std::vector<WcrTest> tests;
    std::vector<std::size_t> first_line;
    std::vector<std::size_t> positives;
    std::unordered_map<std::string, std::size_t> groups;
    std::string line;
    while (r.next(line)) {
        auto f = r.fields(line, 4, "test_id, label, word, context");
        std::string id = r.word(f[0], "test id");
        if (f[1] != "0" && f[1] != "1") r.fail("label must be 0 or 1, got '" + std::string(f[1]) + "'");
        int label = f[1] == "1" ? 1 : 0;
        WcrItem item{{r.word(f[2], "word"), r.words(f[3], "context")}, label};
        std::size_t g = group_index(groups, id, tests.size());
        if (g == tests.size()) {
            tests.push_back({id, {}});
            first_line.push_back(r.line());
            positives.push_back(0);
        }
        if (label == 1 && ++positives[g] > 1) r.fail("test '" + id + "' has a second relevant pair");
        tests[g].items.push_back(std::move(item));
    }
    for (std::size_t g = 0; g < tests.size(); ++g) {
        if (positives[g] != 1) r.fail_at(first_line[g], "test '" + tests[g].id + "' has no relevant pair");
        if (tests[g].items.size() < 2)
            r.fail_at(first_line[g], "test '" + tests[g].id + "' has no irrelevant pair");
    }
    return tests;
}

std::vector<CwsTest> load_cws(std::istream& in, const std::string& name) {
    SchemaReader r(in, name, "CWSv1");
    std::vector<CwsTest> tests;
    std::vector<std::size_t> first_line;
    std::vector<bool> has_query;
    std::unordered_map<std::string, std::size_t> groups;
    std::string line;
    while (r.next(line)) {
        auto f = r.fields(line, 4, "test_id, role, word, context");
        std::string id = r.word(f[0], "test id");
        WordInContext wc{r.word(f[2], "word"), r.words(f[3], "context")};
        std::size_t g = group_index(groups, id, tests.size());
        if (g == tests.size()) {
            tests.push_back({id, {}, {}, {}});
            first_line.push_back(r.line());
            has_query.push_back(false);
        }
        if (f[1] == "query") {
            if (has_query[g]) r.fail("test '" + id + "' has a second query");
            has_query[g] = true;
            tests[g].query = std::move(wc);
        } else if (f[1] == "pos") {
            tests[g].positives.push_back(std::move(wc));
        } else if (f[1] == "neg") {
            tests[g].negatives.push_back(std::move(wc));
        } else {
            r.fail("role must be query, pos or neg, got '" + std::string(f[1]) + "'");
        }
    }
    for (std::size_t g = 0; g < tests.size(); ++g) {
        if (!has_query[g]) r.fail_at(first_line[g], "test '" + tests[g].id + "' has no query");
        if (tests[g].positives.empty()) r.fail_at(first_line[g], "test '" + tests[g].id + "' has no positive");
        if (tests[g].negatives.empty()) r.fail_at(first_line[g], "test '" + tests[g].id + "' has no negative");
    }
    return tests;
}

std::vector<ScwsTest> load_scws(std::istream& in, const std::string& name) {
    SchemaReader r(in, name, "SCWSv1");
    std::vector<ScwsTest> tests;
    std::string line;
    while (r.next(line)) {
        auto f = r.fields(line, 6, "test_id, word1, context1, word2, context2, gold");
        ScwsTest t;
        t.id = r.word(f[0], "test id");
        t.first = {r.word(f[1], "word1"), r.words(f[2], "context1")};
        t.second = {r.word(f[3], "word2"), r.words(f[4], "context2")};
        if (!parse_double(f[5], t.gold) || !std::isfinite(t.gold))
            r.fail("gold score must be a finite number, got '" + std::string(f[5]) + "'");
        tests.push_back(std::move(t));
    }
    return tests;
}

std::vector<WscExample> load_wsc(std::istream& in, const std::string& name) {
    SchemaReader r(in, name, "WSCv1");
    std::vector<WscExample> examples;
    std::string line;
    while (r.next(line)) {
        auto f = r.fields(line, 3, "sense_label, word, sentence");
        WscExample e;
        e.sense = r.word(f[0], "sense label");
        e.word = r.word(f[1], "word");
        e.sentence = r.words(f[2], "sentence");
        examples.push_back(std::move(e));
    }
    return examples;
}

std::vector<WcrTest> load_wcr(const std::string& path) { return load_path<WcrTest>(path, load_wcr); }
std::vector<CwsTest> load_cws(const std::string& path) { return load_path<CwsTest>(path, load_cws); }
std::vector<ScwsTest> load_scws(const std::string& path) { return load_path<ScwsTest>(path, load_scws); }
std::vector<WscExample> load_wsc(const std::string& path) { return load_path<WscExample>(path, load_wsc); }

WcrResult eval_wcr(const std::vector<WcrTest>& tests, const Model& model, std::size_t threads) {
    struct Outcome {
        bool oov = false;
        std::optional<double> spearman;
        double p1 = 0.0;
        std::size_t dropped = 0;
    };
    std::vector<Outcome> outcomes(tests.size());
    parallel_for(tests.size(), threads, [&](std::size_t t) {
        Outcome& o = outcomes[t];
        ScoredLabels sl;
        for (const auto& item : tests[t].items) {
            auto id = model.vocab().find(item.pair.word);
            if (!id) {
                if (item.label == 1) {
                    o.oov = true;
                    return;
                }
                ++o.dropped;
                continue;
            }
            sl.scores.push_back(relevance_score(model, *id, Context{item.pair.context, false}));
            sl.labels.push_back(item.label);
        }
        if (sl.scores.size() < 2) {
            o.oov = true;
            return;
        }
        o.p1 = precision_at_1({sl});
        try {
            o.spearman = spearman(sl.scores, sl.labels);
        } catch (const UndefinedMetric&) {
        }
    });

    WcrResult res;
    res.tests = tests.size();
    double sp_sum = 0.0, p1_sum = 0.0;
    std::size_t sp_count = 0;
    for (const auto& o : outcomes) {
        res.dropped_items += o.dropped;
        if (o.oov) {
            ++res.skipped_oov;
            continue;
        }
        ++res.evaluated;
        p1_sum += o.p1;
        if (o.spearman) {
            sp_sum += *o.spearman;
            ++sp_count;
        } else {
            ++res.skipped_spearman;
        }
    }
    if (res.evaluated == 0) throw DataError("WCR: no test left after vocabulary filtering");
    res.precision_at_1 = p1_sum / static_cast<double>(res.evaluated);
    if (sp_count > 0) res.spearman = sp_sum / static_cast<double>(sp_count);
    return res;
}

CwsResult eval_cws(const std::vector<CwsTest>& tests, const Model& model, std::size_t threads) {
    struct Outcome {
        bool skipped = false;
        double auc = 0, ap = 0;
        std::size_t dropped = 0;
    };
    std::vector<Outcome> outcomes(tests.size());
    parallel_for(tests.size(), threads, [&](std::size_t t) {
        const CwsTest& test = tests[t];
        Outcome& o = outcomes[t];
        if (!model.vocab().contains(test.query.word)) {
            o.skipped = true;
            return;
        }
        auto q = embed(model, test.query);
        ScoredLabels sl;
        std::size_t pos = 0, neg = 0;
        auto add = [&](const std::vector<WordInContext>& side, double label, std::size_t& kept) {
            for (const auto& wc : side) {
                if (!model.vocab().contains(wc.word)) {
                    ++o.dropped;
                    continue;
                }
                sl.scores.push_back(alpha_similarity(q, embed(model, wc), 1.0));
                sl.labels.push_back(label);
                ++kept;
            }
        };
        add(test.positives, 1.0, pos);
        add(test.negatives, 0.0, neg);
        if (pos == 0 || neg == 0) {
            o.skipped = true;
            return;
        }
        o.auc = roc_auc(sl);
        o.ap = average_precision(sl);
    });

    CwsResult res;
    res.tests = tests.size();
    double auc = 0, ap = 0;
    for (const auto& o : outcomes) {
        res.dropped_items += o.dropped;
        if (o.skipped) {
            ++res.skipped;
            continue;
        }
        ++res.evaluated;
        auc += o.auc;
        ap += o.ap;
    }
    if (res.evaluated == 0) throw DataError("CWS: no test left after vocabulary filtering");
    res.auc = auc / static_cast<double>(res.evaluated);
    res.average_precision = ap / static_cast<double>(res.evaluated);
    return res;
}

ScwsResult eval_scws(const std::vector<ScwsTest>& tests, const Model& model, std::size_t threads) {
    std::vector<std::optional<double>> sims(tests.size());
    parallel_for(tests.size(), threads, [&](std::size_t t) {
        const auto& test = tests[t];
        if (!model.vocab().contains(test.first.word) || !model.vocab().contains(test.second.word))
            return;
        sims[t] = alpha_similarity(embed(model, test.first), embed(model, test.second), 1.0);
    });
    ScwsResult res;
    res.tests = tests.size();
    std::vector<double> pred, gold;
    for (std::size_t t = 0; t < tests.size(); ++t) {
        if (!sims[t]) {
            ++res.skipped_oov;
            continue;
        }
        pred.push_back(*sims[t]);
        gold.push_back(tests[t].gold);
    }
    res.retained = pred.size();
    if (res.retained < 2)
        throw DataError("SCWS: " + std::to_string(res.retained) +
                        " tests left after vocabulary filtering, need at least 2");
    res.spearman = spearman(pred, gold);
    return res;
}

std::vector<ScoredPair> scws_pairs(const std::vector<ScwsTest>& tests, const Model& model) {
    std::vector<ScoredPair> pairs;
    for (const auto& test : tests) {
        if (!model.vocab().contains(test.first.word) || !model.vocab().contains(test.second.word))
            continue;
        pairs.push_back({embed(model, test.first), embed(model, test.second), test.gold});
    }
    return pairs;
}

std::vector<WcrNorm> wcr_norms(const std::vector<WcrTest>& tests, const Model& model) {
    std::vector<WcrNorm> out;
    for (const auto& test : tests)
        for (const auto& item : test.items) {
            auto id = model.vocab().find(item.pair.word);
            if (!id) continue;
            out.push_back({test.id, item.label, item.pair.word,
                           relevance_score(model, *id, Context{item.pair.context, false})});
        }
    return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const std::vector<std::size_t>& labels, double fraction, std::uint64_t seed,
    const std::string& word) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("split fraction must lie in (0, 1)");
    std::map<std::size_t, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);

    // mt19937_64's output sequence is fixed by the standard; the shuffle is
    // written out so the split does not depend on the library's std::shuffle.
    std::mt19937_64 rng(seed ^ fnv1a(word));
    std::vector<std::size_t> train, test;
    for (auto& [label, members] : by_label) {
        for (std::size_t i = members.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(rng() % i);
            std::swap(members[i - 1], members[j]);
        }
        auto n = members.size();
        auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
        if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
        else n_train = n;
        train.insert(train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
        test.insert(test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

WscResult eval_wsc(const std::vector<WscExample>& examples, const Model& model,
                   const WscOptions& options, std::size_t threads) {
    if (options.k < 1) throw std::invalid_argument("WSC: K must be >= 1");
    WscResult res;

    // word -> sense -> example indices, words in first-appearance order
    std::vector<std::string> words;
    std::unordered_map<std::string, std::map<std::string, std::vector<std::size_t>>> grouped;
    for (std::size_t e = 0; e < examples.size(); ++e) {
        const auto& ex = examples[e];
        if (!model.vocab().contains(ex.word)) {
            ++res.dropped_oov_examples;
            continue;
        }
        auto [it, fresh] = grouped.try_emplace(ex.word);
        if (fresh) words.push_back(ex.word);
        it->second[ex.sense].push_back(e);
    }
    res.words_total = words.size();

    struct WordJob {
        std::string word;
        std::vector<std::size_t> members;
        std::vector<std::size_t> labels;
        std::size_t senses = 0;
    };
    std::vector<WordJob> jobs;
    for (const auto& word : words) {
        WordJob job{word, {}, {}, 0};
        for (const auto& [sense, members] : grouped[word]) {
            if (members.size() < options.min_sense_examples) {
                res.dropped_rare_examples += members.size();
                continue;
            }
            for (std::size_t m : members) {
                job.members.push_back(m);
                job.labels.push_back(job.senses);
            }
            ++job.senses;
        }
        if (job.senses < 2) {
            ++res.excluded_single_sense;
            continue;
        }
        jobs.push_back(std::move(job));
    }

    struct Outcome {
        std::optional<WscWordResult> result;
        std::string error;
    };
    std::vector<Outcome> outcomes(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t j) {
        const WordJob& job = jobs[j];
        auto [train_idx, test_idx] =
            stratified_split(job.labels, options.split_fraction, options.seed, job.word);
        if (options.k > train_idx.size()) {
            outcomes[j].error = "word '" + job.word + "': K=" + std::to_string(options.k) +
                                " exceeds training set size " + std::to_string(train_idx.size());
            return;
        }
        WordId target = model.vocab().at(job.word);
        auto vec = [&](std::size_t member) {
            const auto& ex = examples[job.members[member]];
            return contextual_embedding(model, target, Context{ex.sentence, true}).vector;
        };
        std::vector<LabeledVector> train;
        train.reserve(train_idx.size());
        for (std::size_t i : train_idx) train.push_back({vec(i), job.labels[i]});
        WscWordResult r;
        r.word = job.word;
        r.senses = job.senses;
        r.train = train_idx.size();
        r.test = test_idx.size();
        for (std::size_t i : test_idx)
            if (knn_classify(train, vec(i), options.k) == job.labels[i]) ++r.correct;
        r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.test);
        outcomes[j].result = std::move(r);
    });

    double sum = 0.0;
    for (auto& o : outcomes) {
        if (!o.result) {
            ++res.skipped_knn;
            res.errors.push_back(std::move(o.error));
            continue;
        }
        sum += o.result->accuracy;
        res.words.push_back(std::move(*o.result));
    }
    if (res.words.empty()) throw DataError("WSC: no word left to evaluate after filtering");
    res.accuracy = sum / static_cast<double>(res.words.size());
    return res;
}

}  // namespace ctxemb
