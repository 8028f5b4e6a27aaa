// Command-line front end. Talks to the library only through the C API.

#include "aose/aose.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(aose_status status, const std::string& what) {
    if (status != AOSE_OK) {
        throw CliError(what + ": " + aose_status_name(status) + ": " + aose_last_error());
    }
}

struct StringDeleter {
    void operator()(char* s) const { aose_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct CorpusDeleter {
    void operator()(aose_corpus* c) const { aose_corpus_free(c); }
};
struct ModelDeleter {
    void operator()(aose_model* m) const { aose_model_free(m); }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError("cannot open '" + path + "' for reading");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_output(const std::string& path, const std::string& data) {
    if (path.empty()) {
        std::cout << data;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError("cannot open '" + path + "' for writing");
    out << data;
    if (!out.flush()) throw CliError("failed writing '" + path + "'");
}

// Resolved invocation of one subcommand. `args` is a complete argv tail
// (defaults made explicit), so replaying it reproduces the run.
struct Manifest {
    std::string subcommand;
    std::vector<std::string> args;
    nlohmann::ordered_json options = nlohmann::ordered_json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    template <class T>
    void option(const std::string& flag, const T& value) {
        options[flag] = value;
        std::ostringstream s;
        s.precision(17);
        s << value;
        args.push_back("--" + flag);
        args.push_back(s.str());
    }

    void write_beside(const std::string& out_path) const {
        if (out_path.empty()) return;
        nlohmann::ordered_json j;
        j["tool"] = "aose";
        j["version"] = aose_version();
        j["subcommand"] = subcommand;
        j["options"] = options;
        j["seed"] = options.contains("seed") ? options["seed"] : nlohmann::ordered_json(nullptr);
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["argv"] = args;
        write_output(out_path + ".manifest.json", j.dump(2) + "\n");
    }
};

// ---- segment ----------------------------------------------------------------

struct SegmentArgs {
    std::string input;
    std::string out;
    aose_segment_config cfg{};
};

void run_segment(const SegmentArgs& a) {
    const std::string data = read_file(a.input);
    char* raw = nullptr;
    size_t docs = 0;
    check(aose_segment_dataset(data.data(), data.size(), &a.cfg, &raw, &docs), "segment");
    OwnedString sentences(raw);
    write_output(a.out, sentences.get());

    Manifest m;
    m.subcommand = "segment";
    m.args.push_back(a.input);
    m.option("min-tokens", a.cfg.min_tokens);
    m.option("max-tokens", a.cfg.max_tokens);
    m.option("doc-cap", a.cfg.doc_token_cap);
    m.option("out", a.out);
    m.inputs = {a.input};
    m.outputs = {a.out};
    m.write_beside(a.out);
    std::cerr << "segmented " << docs << " documents\n";
}

// ---- encode-toy -------------------------------------------------------------

struct EncodeArgs {
    std::string input;
    std::string out;
    size_t dim = 384;
    uint64_t seed = 42;
    size_t label_count = 0;
};

void run_encode(const EncodeArgs& a) {
    const std::string data = read_file(a.input);
    aose_corpus* raw = nullptr;
    check(aose_encode_toy_corpus(data.data(), data.size(), a.dim, a.seed, a.label_count, &raw),
          "encode-toy");
    std::unique_ptr<aose_corpus, CorpusDeleter> corpus(raw);
    char* text = nullptr;
    size_t len = 0;
    check(aose_corpus_serialize(corpus.get(), &text, &len), "encode-toy");
    OwnedString owned(text);
    write_output(a.out, std::string(text, len));

    Manifest m;
    m.subcommand = "encode-toy";
    m.args.push_back(a.input);
    m.option("dim", a.dim);
    m.option("seed", a.seed);
    m.option("label-count", a.label_count);
    m.option("out", a.out);
    m.inputs = {a.input};
    m.outputs = {a.out};
    m.write_beside(a.out);
    std::cerr << "encoded " << aose_corpus_document_count(corpus.get()) << " documents (d="
              << a.dim << ")\n";
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
    std::string input;
    std::string out;
    std::string metrics;
    std::string mode = "frozen";
    aose_train_config cfg{};
};

std::unique_ptr<aose_corpus, CorpusDeleter> load_corpus(const std::string& path) {
    aose_corpus* raw = nullptr;
    size_t renormalized = 0;
    check(aose_corpus_read_file(path.c_str(), &raw, &renormalized), "reading " + path);
    if (renormalized > 0) {
        std::cerr << "warning: " << renormalized << " vectors in " << path
                  << " were not unit-norm and have been re-normalized\n";
    }
    return std::unique_ptr<aose_corpus, CorpusDeleter>(raw);
}

void run_train(TrainArgs a) {
    if (a.mode == "frozen") {
        a.cfg.mode = AOSE_TRAIN_FROZEN;
    } else if (a.mode == "input-grads") {
        a.cfg.mode = AOSE_TRAIN_INPUT_GRADS;
    } else {
        throw CliError("unknown --mode '" + a.mode + "'");
    }
    if (a.metrics.empty()) a.metrics = a.out + ".metrics.jsonl";

    auto corpus = load_corpus(a.input);
    aose_model* raw = nullptr;
    check(aose_train(corpus.get(), &a.cfg, &raw), "train");
    std::unique_ptr<aose_model, ModelDeleter> model(raw);
    check(aose_model_save_file(model.get(), a.out.c_str()), "saving checkpoint");

    std::ostringstream metrics;
    for (size_t e = 0; e < aose_model_epoch_count(model.get()); ++e) {
        aose_epoch_metrics em{};
        check(aose_model_epoch_metrics(model.get(), e, &em), "metrics");
        nlohmann::ordered_json j;
        j["epoch"] = em.epoch;
        j["mean_loss"] = em.mean_loss;
        j["accuracy"] = em.accuracy;
        j["seconds"] = em.seconds;
        if (a.cfg.mode == AOSE_TRAIN_INPUT_GRADS) j["mean_input_grad_norm"] = em.mean_input_grad_norm;
        metrics << j.dump() << '\n';
    }
    write_output(a.metrics, metrics.str());

    Manifest m;
    m.subcommand = "train";
    m.args.push_back(a.input);
    m.option("lr", a.cfg.learning_rate);
    m.option("batch-size", a.cfg.batch_size);
    m.option("accum-steps", a.cfg.accumulation_steps);
    m.option("epochs", a.cfg.epochs);
    m.option("seed", a.cfg.seed);
    m.option("mode", a.mode);
    m.option("threads", a.cfg.threads);
    m.option("out", a.out);
    m.option("metrics", a.metrics);
    m.inputs = {a.input};
    m.outputs = {a.out, a.metrics};
    m.write_beside(a.out);

    const size_t epochs = aose_model_epoch_count(model.get());
    if (epochs > 0) {
        aose_epoch_metrics last{};
        check(aose_model_epoch_metrics(model.get(), epochs - 1, &last), "metrics");
        std::cerr << "trained " << epochs << " epochs, final loss " << last.mean_loss
                  << ", train accuracy " << last.accuracy << "\n";
    }
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
    std::string checkpoint;
    std::string input;
    std::string out;
    size_t threshold = 512;
    bool json = false;
};

void run_eval(const EvalArgs& a) {
    aose_model* raw = nullptr;
    check(aose_model_load_file(a.checkpoint.c_str(), &raw), "loading " + a.checkpoint);
    std::unique_ptr<aose_model, ModelDeleter> model(raw);
    auto corpus = load_corpus(a.input);

    aose_eval_report report{};
    check(aose_evaluate(model.get(), corpus.get(), a.threshold, &report), "eval");
    char* json = nullptr;
    check(aose_eval_report_json(&report, &json), "eval");
    OwnedString owned_json(json);
    char* table = nullptr;
    check(aose_eval_report_table(&report, &table), "eval");
    OwnedString owned_table(table);

    if (!a.out.empty()) write_output(a.out, std::string(json) + "\n");
    if (a.json) {
        if (a.out.empty()) std::cout << json << '\n';
    } else {
        std::cout << table;
    }

    Manifest m;
    m.subcommand = "eval";
    m.args = {a.checkpoint, a.input};
    m.option("threshold", a.threshold);
    m.option("out", a.out);
    if (a.json) m.args.push_back("--json");
    m.options["json"] = a.json;
    m.inputs = {a.checkpoint, a.input};
    m.outputs = {a.out};
    m.write_beside(a.out);
}

// ---- stats ------------------------------------------------------------------

struct StatsArgs {
    std::string input;
    std::string out;
    size_t threshold = 512;
    bool json = false;
};

void run_stats(const StatsArgs& a) {
    const std::string data = read_file(a.input);
    aose_dataset_stats stats{};
    check(aose_dataset_stats_compute(data.data(), data.size(), a.threshold, nullptr, nullptr, &stats),
          "stats");
    char* json = nullptr;
    check(aose_dataset_stats_json(&stats, &json), "stats");
    OwnedString owned_json(json);
    char* table = nullptr;
    check(aose_dataset_stats_table(&stats, &table), "stats");
    OwnedString owned_table(table);

    if (!a.out.empty()) write_output(a.out, std::string(json) + "\n");
    if (a.json) {
        if (a.out.empty()) std::cout << json << '\n';
    } else {
        std::cout << table;
    }

    Manifest m;
    m.subcommand = "stats";
    m.args.push_back(a.input);
    m.option("threshold", a.threshold);
    m.option("out", a.out);
    if (a.json) m.args.push_back("--json");
    m.options["json"] = a.json;
    m.inputs = {a.input};
    m.outputs = {a.out};
    m.write_beside(a.out);
}

// ---- cost -------------------------------------------------------------------

struct CostArgs {
    aose_cost_query query{1, 1, 1, 1, 1};
    std::string sweep;
    std::string out;
};

void run_cost(const CostArgs& a) {
    char* csv = nullptr;
    if (a.sweep.empty()) {
        check(aose_cost_csv(&a.query, 1, &csv), "cost");
    } else {
        check(aose_cost_sweep_csv(a.sweep.c_str(), &csv), "cost");
    }
    OwnedString owned(csv);
    write_output(a.out, csv);

    Manifest m;
    m.subcommand = "cost";
    if (a.sweep.empty()) {
        m.option("t", a.query.t);
        m.option("l", a.query.l);
        m.option("g", a.query.g);
        m.option("w", a.query.w);
        m.option("c", a.query.c);
    } else {
        m.option("sweep", a.sweep);
    }
    m.option("out", a.out);
    m.outputs = {a.out};
    m.write_beside(a.out);
}

int dispatch(std::vector<std::string> argv);

// ---- replay -----------------------------------------------------------------

int run_replay(const std::string& manifest_path, const std::string& out_override) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw CliError("bad manifest '" + manifest_path + "': " + e.what());
    }
    if (!j.contains("subcommand") || !j.contains("argv")) {
        throw CliError("manifest '" + manifest_path + "' lacks subcommand/argv");
    }
    std::vector<std::string> argv{"aose", j["subcommand"].get<std::string>()};
    auto args = j["argv"].get<std::vector<std::string>>();
    if (!out_override.empty()) {
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "--out") args[i + 1] = out_override;
            // Derived outputs follow the new location.
            if (args[i] == "--metrics") args[i + 1] = out_override + ".metrics.jsonl";
        }
    }
    argv.insert(argv.end(), args.begin(), args.end());
    return dispatch(std::move(argv));
}

int dispatch(std::vector<std::string> argv) {
    CLI::App app{"Sentence-attention long-document classification toolkit", "aose"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(aose_version()));

    SegmentArgs seg;
    aose_segment_config_default(&seg.cfg);
    auto* segment = app.add_subcommand("segment", "Split dataset JSONL into sentence JSONL");
    segment->add_option("input", seg.input, "Dataset JSONL ({id,text,label} per line)")->required();
    segment->add_option("--min-tokens", seg.cfg.min_tokens, "Minimum tokens per sentence")->capture_default_str();
    segment->add_option("--max-tokens", seg.cfg.max_tokens, "Maximum tokens per sentence")->capture_default_str();
    segment->add_option("--doc-cap", seg.cfg.doc_token_cap, "Token cap per document")->capture_default_str();
    segment->add_option("--out", seg.out, "Output file (default: stdout)");

    EncodeArgs enc;
    auto* encode = app.add_subcommand("encode-toy", "Embed sentences with the deterministic toy encoder");
    encode->add_option("input", enc.input, "Sentence JSONL from `segment`")->required();
    encode->add_option("--dim", enc.dim, "Embedding dimension (>= 2)")->capture_default_str();
    encode->add_option("--seed", enc.seed, "Encoder seed")->capture_default_str();
    encode->add_option("--label-count", enc.label_count, "Number of classes (0: infer)")->capture_default_str();
    encode->add_option("--out", enc.out, "Output file (default: stdout)");

    TrainArgs tr;
    aose_train_config_default(&tr.cfg);
    auto* trainc = app.add_subcommand("train", "Train the attention head and classifier (frozen embeddings)");
    trainc->add_option("input", tr.input, "Embedding JSONL")->required();
    trainc->add_option("--lr", tr.cfg.learning_rate, "Learning rate")->capture_default_str();
    trainc->add_option("--batch-size", tr.cfg.batch_size, "Micro-batch size")->capture_default_str();
    trainc->add_option("--accum-steps", tr.cfg.accumulation_steps, "Micro-batches per update")->capture_default_str();
    trainc->add_option("--epochs", tr.cfg.epochs, "Epochs")->capture_default_str();
    trainc->add_option("--seed", tr.cfg.seed, "Initialization and shuffle seed")->capture_default_str();
    trainc->add_option("--mode", tr.mode, "frozen | input-grads")->capture_default_str();
    trainc->add_option("--threads", tr.cfg.threads, "Documents processed concurrently")->capture_default_str();
    trainc->add_option("--out", tr.out, "Checkpoint file")->required();
    trainc->add_option("--metrics", tr.metrics, "Per-epoch metrics JSONL (default: <out>.metrics.jsonl)");

    EvalArgs ev;
    auto* evalc = app.add_subcommand("eval", "Length-stratified accuracy of a checkpoint");
    evalc->add_option("checkpoint", ev.checkpoint, "Checkpoint from `train`")->required();
    evalc->add_option("input", ev.input, "Embedding JSONL")->required();
    evalc->add_option("--threshold", ev.threshold, "Long-document token threshold")->capture_default_str();
    evalc->add_option("--out", ev.out, "Write the JSON report here");
    evalc->add_flag("--json", ev.json, "Print JSON instead of the table");

    StatsArgs st;
    auto* stats = app.add_subcommand("stats", "Dataset statistics");
    stats->add_option("input", st.input, "Dataset JSONL")->required();
    stats->add_option("--threshold", st.threshold, "Long-document token threshold")->capture_default_str();
    stats->add_option("--out", st.out, "Write the JSON report here");
    stats->add_flag("--json", st.json, "Print JSON instead of the table");

    CostArgs co;
    auto* cost = app.add_subcommand("cost", "Attention cost of the compared architectures (CSV)");
    cost->add_option("--t", co.query.t, "Sentences per document")->capture_default_str();
    cost->add_option("--l", co.query.l, "Tokens per sentence")->capture_default_str();
    cost->add_option("--g", co.query.g, "Global attention tokens")->capture_default_str();
    cost->add_option("--w", co.query.w, "Local attention window")->capture_default_str();
    cost->add_option("--c", co.query.c, "Recurrence segment length")->capture_default_str();
    cost->add_option("--sweep", co.sweep, "Grid, e.g. t=1:100,l=20,g=2,w=4,c=512");
    cost->add_option("--out", co.out, "Output file (default: stdout)");

    std::string manifest_path;
    std::string replay_out;
    auto* replay = app.add_subcommand("replay", "Re-run an invocation from its manifest");
    replay->add_option("manifest", manifest_path, "*.manifest.json written by a previous run")->required();
    replay->add_option("--out", replay_out, "Write outputs here instead of the recorded path");

    std::vector<std::string> reversed(argv.rbegin(), argv.rend() - 1);
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (*segment) run_segment(seg);
    else if (*encode) run_encode(enc);
    else if (*trainc) run_train(tr);
    else if (*evalc) run_eval(ev);
    else if (*stats) run_stats(st);
    else if (*cost) run_cost(co);
    else if (*replay) return run_replay(manifest_path, replay_out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(std::vector<std::string>(argv, argv + argc));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
