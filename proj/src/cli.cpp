#include "ctxemb/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "ctxemb/cooccurrence.hpp"
#include "ctxemb/corpus.hpp"
#include "ctxemb/embedding.hpp"
#include "ctxemb/evalharness.hpp"
#include "ctxemb/similarity.hpp"

namespace ctxemb::cli {

namespace {

struct RunConfig {
    std::string corpus, vocab, cooc, embeddings, dataset, task, out;
    std::string stopwords;  // path, "none", or empty for the bundled list
    std::uint64_t min_count = 2000;
    std::uint32_t window = 5;
    double alpha = 1.0;
    std::size_t k = 10;
    std::size_t knn_k = 5;
    double split = 0.8;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::optional<bool> include_target;

    // subcommand arguments
    std::string word, context, phrase, alphas, from, input;
};

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw UsageError(std::string("missing required flag ") + flag);
}

// Key-value report with full-precision numbers, written only when --out is set.
class Report {
public:
    void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
    void add(const std::string& key, double value) { add(key, format_exact(value)); }
    void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }

    void write(const std::string& path) const {
        if (path.empty()) return;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw DataError("cannot write report: " + path);
        for (const auto& [k, v] : lines_) f << k << '=' << v << '\n';
        if (!f) throw DataError("write failed: " + path);
    }

private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

std::vector<std::string> words_of(const std::string& text) {
    auto parts = split_ws(text);
    return {parts.begin(), parts.end()};
}

Model load(const RunConfig& cfg) {
    require(cfg.vocab, "--vocab");
    require(cfg.cooc, "--cooc");
    require(cfg.embeddings, "--embeddings");
    return load_model(cfg.vocab, cfg.cooc, cfg.embeddings);
}

WordId target_of(const Model& model, const std::string& word) {
    require(word, "--word");
    auto id = model.vocab().find(word);
    if (!id) throw DataError("word not in vocabulary: " + word);
    return *id;
}

void print_ranking(std::ostream& out, const Model& model, const std::vector<ScoredWord>& ranked,
                   const char* score_name) {
    out << "rank\tword\t" << score_name << '\n';
    for (std::size_t r = 0; r < ranked.size(); ++r)
        out << r + 1 << '\t' << model.vocab().word(ranked[r].word) << '\t'
            << format_fixed(ranked[r].score, 4) << '\n';
}

// Neighbours of a (possibly zero) query; a zero query at alpha = 1 is an error.
void print_neighbors(std::ostream& out, std::ostream& err, const Model& model,
                     const std::vector<double>& query, const RunConfig& cfg) {
    if (l2_norm(query) == 0.0) {
        if (cfg.alpha == 1.0)
            throw DataError("contextual embedding is zero; cosine of zero vector undefined");
        err << "warning\tzero contextual embedding: all scores are 0\n";
    }
    print_ranking(out, model, nearest_words(query, model.base(), cfg.alpha, cfg.k), "score");
}

int cmd_build(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    require(cfg.corpus, "--corpus");
    require(cfg.vocab, "--vocab");
    require(cfg.cooc, "--cooc");
    if (cfg.min_count < 1) throw UsageError("--min-count must be >= 1");
    if (cfg.window < 1) throw UsageError("--window must be >= 1");

    WordSet stop;
    if (cfg.stopwords.empty()) stop = default_stopwords();
    else if (cfg.stopwords != "none") stop = load_stopwords(cfg.stopwords);

    std::size_t warnings = 0;
    TokenStream stream = tokenize_file(cfg.corpus, &warnings);
    if (warnings > 0) err << "warning\tskipped " << warnings << " undecodable byte(s)\n";
    Vocabulary vocab = build_vocabulary(stream, cfg.min_count, stop, cfg.threads);
    RawCoocCounts raw = count_cooccurrences(stream, vocab, cfg.window, cfg.threads);
    CoocMatrix cooc = normalize(raw, vocab);
    vocab.save(cfg.vocab);
    cooc.save(cfg.cooc);

    out << "tokens\t" << stream.size() << '\n';
    out << "V\t" << vocab.size() << '\n';
    out << "nnz\t" << cooc.nnz() << '\n';

    Report report;
    report.add("command", "build");
    report.add("tokens", stream.size());
    report.add("vocab_size", vocab.size());
    report.add("nnz", cooc.nnz());
    report.add("window_radius", static_cast<std::size_t>(cfg.window));
    report.add("min_count", static_cast<std::size_t>(cfg.min_count));
    report.add("decode_warnings", warnings);
    report.write(cfg.out);
    return kOk;
}

int cmd_neighbors(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Model model = load(cfg);
    WordId target = target_of(model, cfg.word);
    Context ctx{words_of(cfg.context), cfg.include_target.value_or(true)};
    auto u = contextual_embedding(model, target, ctx);
    out << "norm\t" << format_fixed(u.norm, 4) << '\n';
    out << "context_size\t" << u.context_size << '\n';
    print_neighbors(out, err, model, u.vector, cfg);
    return kOk;
}

int cmd_phrase(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Model model = load(cfg);
    require(cfg.phrase, "--phrase");
    auto v = phrase_embedding(model, words_of(cfg.phrase));
    out << "norm\t" << format_fixed(l2_norm(v), 4) << '\n';
    print_neighbors(out, err, model, v, cfg);
    return kOk;
}

int cmd_top_norm(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    Model model = load(cfg);
    require(cfg.context, "--context");
    Context ctx{words_of(cfg.context), cfg.include_target.value_or(true)};
    print_ranking(out, model, top_norm_words(model, ctx, cfg.k), "norm");
    return kOk;
}

std::string optional_number(const std::optional<double>& v, int decimals) {
    return v ? format_fixed(*v, decimals) : "undefined";
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    require(cfg.task, "--task");
    require(cfg.dataset, "--dataset");
    if (cfg.task != "wcr" && cfg.task != "cws" && cfg.task != "scws" && cfg.task != "wsc")
        throw UsageError("--task must be one of wcr, cws, scws, wsc");
    Model model = load(cfg);

    Report report;
    report.add("task", cfg.task);
    report.add("vocab_size", model.vocab().size());
    report.add("dim", model.dim());
    out << "task\t" << cfg.task << '\n';

    if (cfg.task == "wcr") {
        auto r = eval_wcr(load_wcr(cfg.dataset), model, cfg.threads);
        out << "spearman\t" << optional_number(r.spearman, 4) << '\n'
            << "precision_at_1\t" << format_fixed(r.precision_at_1, 4) << '\n'
            << "tests\t" << r.tests << '\n'
            << "evaluated\t" << r.evaluated << '\n'
            << "skipped_oov\t" << r.skipped_oov << '\n'
            << "skipped_spearman\t" << r.skipped_spearman << '\n'
            << "dropped_items\t" << r.dropped_items << '\n';
        report.add("spearman", r.spearman ? format_exact(*r.spearman) : "undefined");
        report.add("precision_at_1", r.precision_at_1);
        report.add("tests", r.tests);
        report.add("evaluated", r.evaluated);
        report.add("skipped_oov", r.skipped_oov);
        report.add("skipped_spearman", r.skipped_spearman);
        report.add("dropped_items", r.dropped_items);
    } else if (cfg.task == "cws") {
        auto r = eval_cws(load_cws(cfg.dataset), model, cfg.threads);
        out << "auc\t" << format_fixed(r.auc, 4) << '\n'
            << "average_precision\t" << format_fixed(r.average_precision, 4) << '\n'
            << "tests\t" << r.tests << '\n'
            << "evaluated\t" << r.evaluated << '\n'
            << "skipped\t" << r.skipped << '\n'
            << "dropped_items\t" << r.dropped_items << '\n';
        report.add("auc", r.auc);
        report.add("average_precision", r.average_precision);
        report.add("tests", r.tests);
        report.add("evaluated", r.evaluated);
        report.add("skipped", r.skipped);
        report.add("dropped_items", r.dropped_items);
    } else if (cfg.task == "scws") {
        auto r = eval_scws(load_scws(cfg.dataset), model, cfg.threads);
        out << "spearman\t" << format_fixed(r.spearman, 4) << '\n'
            << "tests\t" << r.tests << '\n'
            << "retained\t" << r.retained << '\n'
            << "skipped_oov\t" << r.skipped_oov << '\n';
        report.add("spearman", r.spearman);
        report.add("tests", r.tests);
        report.add("retained", r.retained);
        report.add("skipped_oov", r.skipped_oov);
    } else {
        if (!(cfg.split > 0.0 && cfg.split < 1.0)) throw UsageError("--split must lie in (0, 1)");
        WscOptions opt;
        opt.k = cfg.knn_k;
        opt.split_fraction = cfg.split;
        opt.seed = cfg.seed;
        auto r = eval_wsc(load_wsc(cfg.dataset), model, opt, cfg.threads);
        for (const auto& e : r.errors) err << "warning\t" << e << '\n';
        out << "accuracy\t" << format_fixed(r.accuracy, 4) << '\n'
            << "knn_k\t" << opt.k << '\n'
            << "words_total\t" << r.words_total << '\n'
            << "words_evaluated\t" << r.words.size() << '\n'
            << "excluded_single_sense\t" << r.excluded_single_sense << '\n'
            << "skipped_knn\t" << r.skipped_knn << '\n'
            << "dropped_oov_examples\t" << r.dropped_oov_examples << '\n'
            << "dropped_rare_examples\t" << r.dropped_rare_examples << '\n';
        out << "word\tsenses\ttrain\ttest\taccuracy\n";
        for (const auto& w : r.words)
            out << w.word << '\t' << w.senses << '\t' << w.train << '\t' << w.test << '\t'
                << format_fixed(w.accuracy, 4) << '\n';
        report.add("accuracy", r.accuracy);
        report.add("knn_k", opt.k);
        report.add("split", opt.split_fraction);
        report.add("seed", static_cast<std::size_t>(opt.seed));
        report.add("words_total", r.words_total);
        report.add("words_evaluated", r.words.size());
        report.add("excluded_single_sense", r.excluded_single_sense);
        report.add("skipped_knn", r.skipped_knn);
        report.add("dropped_oov_examples", r.dropped_oov_examples);
        report.add("dropped_rare_examples", r.dropped_rare_examples);
        for (const auto& w : r.words) report.add("word." + w.word + ".accuracy", w.accuracy);
    }
    report.write(cfg.out);
    return kOk;
}

std::vector<double> parse_alphas(const std::string& text) {
    std::vector<double> alphas;
    if (text.empty()) {
        for (int i = 0; i <= 10; ++i) alphas.push_back(i / 10.0);
        return alphas;
    }
    for (auto field : split(text, ',')) {
        double a = 0;
        if (!parse_double(field, a) || !(a >= 0.0 && a <= 1.0))
            throw UsageError("--alphas: '" + std::string(field) + "' is not a number in [0, 1]");
        alphas.push_back(a);
    }
    return alphas;
}

int cmd_alpha_sweep(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    require(cfg.dataset, "--dataset");
    auto alphas = parse_alphas(cfg.alphas);
    Model model = load(cfg);
    auto sweep = alpha_sweep(scws_pairs(load_scws(cfg.dataset), model), alphas);
    Report report;
    out << "alpha\tspearman\n";
    for (const auto& p : sweep) {
        out << format_fixed(p.alpha, 4) << '\t' << format_fixed(p.spearman, 4) << '\n';
        report.add("spearman." + format_exact(p.alpha), p.spearman);
    }
    report.write(cfg.out);
    return kOk;
}

int cmd_norms(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    require(cfg.dataset, "--dataset");
    Model model = load(cfg);
    out << "test\tlabel\tword\tnorm\n";
    for (const auto& n : wcr_norms(load_wcr(cfg.dataset), model))
        out << n.test << '\t' << n.label << '\t' << n.word << '\t' << format_exact(n.norm) << '\n';
    return kOk;
}

// Stanford SCWS ratings.txt: id, word1, POS1, word2, POS2, context1,
// context2, mean rating, ten individual ratings. Target words are wrapped in
// <b> </b> inside the contexts.
int cmd_convert(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    require(cfg.from, "--from");
    require(cfg.input, "--input");
    require(cfg.out, "--out");
    if (cfg.from != "scws-ratings") throw UsageError("--from must be scws-ratings");
    std::ifstream in(cfg.input, std::ios::binary);
    if (!in) throw DataError("cannot open " + cfg.input);
    std::ofstream dst(cfg.out, std::ios::binary);
    if (!dst) throw DataError("cannot write " + cfg.out);

    auto clean = [](std::string text) {
        for (const char* tag : {"<b>", "</b>"})
            for (auto pos = text.find(tag); pos != std::string::npos; pos = text.find(tag))
                text.replace(pos, std::char_traits<char>::length(tag), " ");
        return tokenize(text).tokens;
    };
    auto join = [](const std::vector<std::string>& ws) {
        std::string s;
        for (const auto& w : ws) (s.empty() ? s : s += ' ') += w;
        return s;
    };

    dst << "SCWSv1\n";
    std::string line;
    std::size_t lineno = 0, written = 0, skipped = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split(line, '\t');
        if (f.size() < 8) throw FormatError(cfg.input, lineno, "expected at least 8 tab-separated fields");
        auto w1 = tokenize(f[1]).tokens;
        auto w2 = tokenize(f[3]).tokens;
        auto c1 = clean(std::string(f[5]));
        auto c2 = clean(std::string(f[6]));
        double gold = 0;
        if (!parse_double(f[7], gold)) throw FormatError(cfg.input, lineno, "bad mean rating");
        if (w1.size() != 1 || w2.size() != 1 || c1.empty() || c2.empty()) {
            ++skipped;
            continue;
        }
        dst << f[0] << '\t' << w1[0] << '\t' << join(c1) << '\t' << w2[0] << '\t' << join(c2)
            << '\t' << format_exact(gold) << '\n';
        ++written;
    }
    if (skipped > 0) err << "warning\tskipped " << skipped << " record(s) with multi-token words\n";
    out << "written\t" << written << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Contextual word embeddings from co-occurrence-weighted base vectors", "ctxemb"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key=value file mirroring the flags");

    RunConfig cfg;
    std::optional<std::string> include_target;
    app.add_option("--corpus", cfg.corpus, "Raw text corpus");
    app.add_option("--vocab", cfg.vocab, "Vocabulary file (VOCABv1)");
    app.add_option("--cooc", cfg.cooc, "Co-occurrence matrix file (COOCv1)");
    app.add_option("--embeddings", cfg.embeddings, "Base vectors, plain-text word-per-line");
    app.add_option("--min-count", cfg.min_count, "Minimum corpus frequency")->capture_default_str();
    app.add_option("--stopwords", cfg.stopwords, "Stopword file, or 'none' (default: bundled list)");
    app.add_option("--window", cfg.window, "Co-occurrence window radius")->capture_default_str();
    app.add_option("--alpha", cfg.alpha, "Similarity blend: 1 = cosine, 0 = dot product")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--k", cfg.k, "Number of ranked words to print")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--knn-k", cfg.knn_k, "K for the K-NN sense classifier")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--split", cfg.split, "Training fraction of the sense split")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for the sense split")->capture_default_str();
    app.add_option("--dataset", cfg.dataset, "Evaluation dataset");
    app.add_option("--task", cfg.task, "Evaluation task: wcr, cws, scws, wsc");
    app.add_option("--out", cfg.out, "Report / output file");
    app.add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--include-target", include_target, "Keep the target word in its context (true/false)")
        ->check(CLI::IsMember({"true", "false"}));

    using Handler = std::function<int(const RunConfig&, std::ostream&, std::ostream&)>;
    std::map<std::string, Handler> handlers;
    auto sub = [&](const char* name, const char* help, Handler h) {
        handlers[name] = std::move(h);
        auto* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };
    sub("build", "Tokenize a corpus and write the vocabulary and co-occurrence matrix", cmd_build);
    auto* nb = sub("neighbors", "Nearest base vectors to a word's contextual embedding", cmd_neighbors);
    nb->add_option("--word", cfg.word, "Target word");
    nb->add_option("--context", cfg.context, "Context words, space-separated");
    auto* ph = sub("phrase", "Nearest base vectors to a phrase embedding", cmd_phrase);
    ph->add_option("--phrase", cfg.phrase, "Phrase words, space-separated");
    auto* tn = sub("top-norm", "Words with the largest contextual-embedding norm in a context", cmd_top_norm);
    tn->add_option("--context", cfg.context, "Context words, space-separated");
    sub("eval", "Evaluate on a wcr, cws, scws or wsc dataset", cmd_eval);
    auto* sw = sub("alpha-sweep", "SCWS Spearman for a list of alpha values", cmd_alpha_sweep);
    sw->add_option("--alphas", cfg.alphas, "Comma-separated alphas (default 0,0.1,...,1)");
    sub("norms", "Relevance norm of every WCR word-context pair", cmd_norms);
    auto* cv = sub("convert", "Convert a published dataset into a native schema", cmd_convert);
    cv->add_option("--from", cfg.from, "Source format: scws-ratings");
    cv->add_option("--input", cfg.input, "Source file");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << "error\tusage\t" << e.what() << '\n';
        return kUsage;
    }
    if (include_target) cfg.include_target = (*include_target == "true");

    try {
        for (auto* s : app.get_subcommands()) return handlers.at(s->get_name())(cfg, out, err);
        return kUsage;
    } catch (const UsageError& e) {
        err << "error\tusage\t" << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        err << "error\tdata\t" << e.what() << '\n';
        return kData;
    } catch (const InvariantError& e) {
        err << "error\tinternal\t" << e.what() << '\n';
        return kInternal;
    } catch (const std::invalid_argument& e) {
        err << "error\tusage\t" << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error\tinternal\t" << e.what() << '\n';
        return kInternal;
    }
}

}  // namespace ctxemb::cli
