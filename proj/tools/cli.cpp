#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "etg/etg.hpp"
#include "etg/io.hpp"

namespace etg::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

// Input problems map to exit status 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::uint64_t seed = 0;
    bool merge = false;
    bool strict_match = false;
    std::string in;
    std::string gold;
    std::string out = "-";
    std::size_t k = 4;
    bool no_original = false;
    double lambda = 0.5;
    std::vector<double> weights{1.0, 1.0, 1.0};
    std::size_t warmup = 0;
    std::optional<double> ce;
    std::size_t step = 0;
    std::string order = "appearance";
    std::string allowlist;
    std::size_t cap = 2000;
    double test_fraction = 0.05;
    double min_score = 0.0;
    std::size_t warmup_epochs = 10;
    std::size_t spr_epochs = 3;
    std::size_t steps_per_epoch = 1;
};

std::shared_ptr<spdlog::logger> logger() {
    static auto log = [] {
        auto l = spdlog::stderr_color_mt("toolkit");
        l->set_pattern("[%l] %v");
        l->set_level(spdlog::level::warn);
        if (const char* env = std::getenv("TOOLKIT_LOG")) l->set_level(spdlog::level::from_str(env));
        return l;
    }();
    return log;
}

std::string read_all(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Calls `fn(line, line_number)` for each non-empty line.
template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (path != "-") {
        file.open(path, std::ios::binary);
        if (!file) throw InputError("cannot open " + path);
        in = &file;
    }
    std::string line;
    std::size_t n = 0;
    while (std::getline(*in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        fn(line, n);
    }
}

Json parse_json_line(const std::string& line, const std::string& path, std::size_t n) {
    try {
        return Json::parse(line);
    } catch (const Json::parse_error& e) {
        throw InputError(fmt::format("{}:{}: invalid JSON: {}", path, n, e.what()));
    }
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (path != "-") {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw InputError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

MatchMode match_mode(const Options& o) { return o.strict_match ? MatchMode::Strict : MatchMode::Normalized; }

TemporalGraph graph_from_dot(const std::string& text, bool merge) {
    const auto edges = parse(text).edge_list();
    TemporalGraph g = TemporalGraph::from_edges(edges);
    return merge ? g.merge_reciprocals() : g;
}

std::string row_string(const Json& row, std::initializer_list<const char*> keys, const std::string& where) {
    for (const char* k : keys) {
        if (row.contains(k) && row[k].is_string()) return row[k].get<std::string>();
    }
    throw InputError(where + ": missing string field '" + *keys.begin() + "'");
}

int cmd_parse(const Options& o) {
    const ParseOutcome p = parse(read_all(o.in));
    Output out(o.out);
    out.stream() << io::parse_outcome_to_json(p).dump(2) << '\n';
    logger()->info("parsed {} edge(s), skipped {} line(s)", p.edges.size(), p.skipped_lines);
    return 0;
}

int cmd_augment(const Options& o) {
    Output out(o.out);
    std::size_t row_index = 0, skipped = 0, written = 0;
    for_each_line(o.in, [&](const std::string& line, std::size_t n) {
        const Json row = parse_json_line(line, o.in, n);
        const std::string where = fmt::format("{}:{}", o.in, n);
        const std::string target = row_string(row, {"target"}, where);
        const std::size_t index = row_index++;
        AugmentationConfig cfg{o.k, document_seed(o.seed, index), !o.no_original};
        std::vector<LinearizedGraph> variants;
        try {
            variants = make_augmented_set(LinearizedGraph{target, parse(target).edge_list()}, cfg);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::UnparseableTarget) throw;
            logger()->warn("{}: {}", where, e.what());
            ++skipped;
            return;
        }
        for (auto& v : variants) {
            Json copy = row;
            copy["target"] = v.text;
            out.stream() << copy.dump() << '\n';
            ++written;
        }
    });
    logger()->info("wrote {} row(s); skipped {} unparseable target(s)", written, skipped);
    return 0;
}

struct TargetFile {
    std::vector<std::string> order;
    std::map<std::string, std::string> targets;
};

TargetFile read_targets(const std::string& path) {
    TargetFile f;
    for_each_line(path, [&](const std::string& line, std::size_t n) {
        const Json row = parse_json_line(line, path, n);
        const std::string where = fmt::format("{}:{}", path, n);
        const std::string id = row_string(row, {"doc_id"}, where);
        const std::string target = row_string(row, {"target", "prediction", "output"}, where);
        if (f.targets.emplace(id, target).second) {
            f.order.push_back(id);
        } else {
            logger()->warn("{}: repeated doc_id '{}' ignored", where, id);
        }
    });
    return f;
}

int cmd_eval(const Options& o) {
    const TargetFile pred = read_targets(o.in);
    const TargetFile gold = read_targets(o.gold);
    std::vector<ScoredPair> pairs;
    pairs.reserve(gold.order.size());
    for (const auto& id : gold.order) {
        auto it = pred.targets.find(id);
        if (it == pred.targets.end()) logger()->warn("no prediction for '{}', scored as empty", id);
        pairs.push_back({id, graph_from_dot(it == pred.targets.end() ? std::string() : it->second, o.merge),
                         graph_from_dot(gold.targets.at(id), o.merge)});
    }
    for (const auto& id : pred.order) {
        if (!gold.targets.count(id)) logger()->warn("prediction '{}' has no gold row and is ignored", id);
    }
    const EvalReport report = evaluate_corpus(pairs, match_mode(o));
    Output out(o.out);
    out.stream() << io::eval_report_to_json(report).dump(2) << '\n';
    return 0;
}

SprConfig spr_config(const Options& o) {
    if (o.weights.size() != 3) throw InputError("--weights expects three comma-separated values");
    SprConfig cfg{o.weights[0], o.weights[1], o.weights[2], o.lambda, o.warmup};
    cfg.validate();
    return cfg;
}

int cmd_spr(const Options& o) {
    const SprConfig cfg = spr_config(o);
    Json sampled_json, gold_json;
    try {
        sampled_json = Json::parse(read_all(o.in));
        gold_json = Json::parse(read_all(o.gold));
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
    if (!sampled_json.contains("sampled") || !sampled_json["sampled"].is_string()) {
        throw InputError(o.in + ": missing string field 'sampled'");
    }
    const io::HiddenStateFixture sampled = io::hidden_fixture_from_json(sampled_json);
    const std::string gold_target = row_string(gold_json, {"target"}, o.gold);
    const TemporalGraph gold = graph_from_dot(gold_target, o.merge);

    std::vector<EdgeEmbedding> gold_embeddings;
    if (gold_json.contains("embeddings")) {
        for (const auto& e : gold_json["embeddings"]) gold_embeddings.push_back({e.get<std::vector<double>>()});
    } else {
        // Teacher-forced gold states: embed each unique gold edge at its first occurrence.
        const io::HiddenStateFixture fixture = io::hidden_fixture_from_json(gold_json);
        const auto edges = parse(gold_target).edge_list();
        std::set<EdgeKey> seen;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (!seen.insert(edge_key(edges[i])).second) continue;
            if (i >= fixture.spans.size() || !fixture.spans[i]) {
                throw InputError(fmt::format("{}: no span for gold edge {}", o.gold, i));
            }
            gold_embeddings.push_back(edge_embedding(fixture.states, *fixture.spans[i]));
        }
    }

    std::optional<LossInput> loss;
    if (o.ce) loss = LossInput{*o.ce, o.step};
    const SprReport report = compute_spr(sampled_json["sampled"].get<std::string>(), gold, sampled.states,
                                         sampled.spans, gold_embeddings, cfg, loss);
    Output out(o.out);
    out.stream() << io::spr_report_to_json(report).dump(2) << '\n';
    return 0;
}

int cmd_schedule(const Options& o) {
    const ActivationSchedule s = spr_schedule({o.warmup_epochs, o.spr_epochs, o.steps_per_epoch});
    Output out(o.out);
    out.stream() << io::schedule_to_json(s).dump() << '\n';
    return 0;
}

std::vector<CorpusDocument> read_documents(const std::string& path) {
    std::vector<CorpusDocument> docs;
    std::size_t rejected = 0;
    for_each_line(path, [&](const std::string& line, std::size_t n) {
        const Json row = parse_json_line(line, path, n);
        try {
            docs.push_back(io::document_from_json(row));
        } catch (const Error& e) {
            logger()->warn("{}:{}: {}", path, n, e.what());
            ++rejected;
        }
    });
    if (rejected > 0) logger()->warn("{} annotation row(s) skipped", rejected);
    return docs;
}

int cmd_efidf(const Options& o) {
    SalienceCounts counts;
    std::size_t rejected = 0;
    for_each_line(o.in, [&](const std::string& line, std::size_t n) {
        const Json row = parse_json_line(line, o.in, n);
        try {
            counts.add(io::document_from_json(row));
        } catch (const Error& e) {
            logger()->warn("{}:{}: {}", o.in, n, e.what());
            ++rejected;
        }
    });
    const SalienceTable table = salience_table(counts, o.min_score);
    Output out(o.out);
    for (const auto& e : table.entries) {
        std::string descriptor = e.descriptor;
        std::replace_if(descriptor.begin(), descriptor.end(), [](char c) { return c == '\t' || c == '\n'; }, ' ');
        out.stream() << e.event << '\t' << descriptor << '\t' << fmt::format("{:.6f}", e.score) << '\n';
    }
    return 0;
}

void write_rows(const fs::path& path, const std::vector<DatasetRow>& rows) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write " + path.string());
    for (const auto& r : rows) f << io::row_to_json(r).dump() << '\n';
}

int cmd_pipeline(const Options& o) {
    const std::vector<CorpusDocument> docs = read_documents(o.in);
    std::vector<std::string> allow;
    if (!o.allowlist.empty()) {
        for_each_line(o.allowlist, [&](const std::string& line, std::size_t) { allow.push_back(line); });
    } else {
        std::set<std::string> all;
        for (const auto& d : docs) all.insert(d.descriptors.begin(), d.descriptors.end());
        allow.assign(all.begin(), all.end());
    }
    const Selection selection = select_documents(docs, allow, o.cap);
    const Split split = split_documents(selection.documents, o.test_fraction, o.seed);

    EmitOptions train_opts;
    train_opts.merge = o.merge;
    train_opts.order = o.order == "random" ? EdgeOrder::Random : EdgeOrder::Appearance;
    train_opts.augment = {o.k, o.seed, true};
    EmitOptions test_opts = train_opts;
    test_opts.augment.k = 0;

    const EmitResult train = emit_dataset(split.train, train_opts);
    const EmitResult test = emit_dataset(split.test, test_opts);

    const fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
    write_rows(dir / "train.jsonl", train.rows);
    write_rows(dir / "test.jsonl", test.rows);
    logger()->info("selected {} document(s) ({} dropped without edges); {} train / {} test rows",
                   selection.documents.size(), selection.dropped_empty, train.rows.size(), test.rows.size());
    logger()->info("dropped {} self-loop(s), {} invalid relation(s)", train.self_loops + test.self_loops,
                   train.invalid_relations + test.invalid_relations);
    return 0;
}

CLI::Validator input_path() {
    return CLI::Validator(
        [](std::string& p) { return (p == "-" || fs::is_regular_file(p)) ? std::string() : "no such file: " + p; },
        "FILE|-");
}

CLI::Validator output_path() {
    return CLI::Validator(
        [](std::string& p) {
            if (p == "-") return std::string();
            const fs::path parent = fs::path(p).parent_path();
            return (parent.empty() || fs::is_directory(parent)) ? std::string()
                                                                : "directory does not exist: " + parent.string();
        },
        "PATH|-");
}

}  // namespace

int run(const std::vector<std::string>& args) {
    Options o;
    CLI::App app{"Event temporal graph toolkit: DOT targets, augmentation, set regularizers and evaluation",
                 "toolkit"};
    app.require_subcommand(1, 1);
    app.add_option("--seed", o.seed, "Seed for every random choice (default 0)");
    app.add_flag("--merge", o.merge, "Rewrite after/is_included as before/includes by swapping events");
    app.add_flag("--strict-match", o.strict_match, "Compare event strings exactly instead of normalized");

    auto add_in = [&](CLI::App* sub, const std::string& names, const std::string& help) {
        sub->add_option(names, o.in, help)->required()->check(input_path());
    };
    auto add_out = [&](CLI::App* sub, const std::string& help) {
        sub->add_option("--out", o.out, help)->check(output_path());
    };
    auto add_spr_weights = [&](CLI::App* sub) {
        sub->add_option("--lambda", o.lambda, "Weight of SPR against cross-entropy, in [0,1] (default 0.5)");
        sub->add_option("--weights", o.weights, "Regularizer weights wd,wc,wm (default 1,1,1)")->delimiter(',')->expected(3);
        sub->add_option("--warmup", o.warmup, "Steps before SPR is mixed into the loss (default 0)");
    };

    auto* p = app.add_subcommand("parse", "DOT text -> edges JSON");
    add_in(p, "--in", "DOT file");
    add_out(p, "Edges JSON (default stdout)");

    auto* a = app.add_subcommand("augment", "Dataset JSONL -> JSONL with permuted targets");
    add_in(a, "--in", "Dataset JSONL with doc_id/input/target rows");
    add_out(a, "Augmented JSONL (default stdout)");
    a->add_option("--k", o.k, "Permutations per row (default 4)");
    a->add_flag("--no-original", o.no_original, "Omit the unpermuted row");

    auto* e = app.add_subcommand("eval", "Prediction vs gold JSONL -> report JSON");
    add_in(e, "--in,--pred", "Predictions JSONL (doc_id + target)");
    e->add_option("--gold", o.gold, "Gold JSONL (doc_id + target)")->required()->check(input_path());
    add_out(e, "Report JSON (default stdout)");

    auto* s = app.add_subcommand("spr", "Sampled DOT + hidden states + gold -> SPR report JSON");
    add_in(s, "--in", "JSON with 'sampled', 'dim', 'states', 'spans'");
    s->add_option("--gold", o.gold, "JSON with 'target' and either 'embeddings' or 'dim'/'states'/'spans'")
        ->required()
        ->check(input_path());
    add_out(s, "Report JSON (default stdout)");
    add_spr_weights(s);
    s->add_option("--ce", o.ce, "Token-level cross-entropy; adds combined_loss to the report");
    s->add_option("--step", o.step, "Training step for the warmup check (default 0)");

    auto* sc = app.add_subcommand("schedule", "Two-phase epoch plan -> activation JSON");
    sc->add_option("--warmup-epochs", o.warmup_epochs, "Epochs without SPR (default 10)");
    sc->add_option("--spr-epochs", o.spr_epochs, "Epochs with SPR (default 3)");
    sc->add_option("--steps-per-epoch", o.steps_per_epoch, "Optimizer steps per epoch (default 1)");
    add_out(sc, "Schedule JSON (default stdout)");

    auto* f = app.add_subcommand("efidf", "Annotations JSONL -> salience TSV (event, descriptor, score)");
    add_in(f, "--in", "Annotations JSONL");
    add_out(f, "TSV (default stdout)");
    f->add_option("--min-score", o.min_score, "Drop entries scoring below this (default 0)");

    auto* pl = app.add_subcommand("pipeline", "Annotations JSONL -> OUT/train.jsonl and OUT/test.jsonl");
    add_in(pl, "--in", "Annotations JSONL");
    pl->add_option("--out", o.out, "Output directory")->required();
    pl->add_option("--k", o.k, "Permutations per training document (default 4)");
    pl->add_option("--order", o.order, "Target edge order (default appearance)")
        ->check(CLI::IsMember({"appearance", "random"}));
    pl->add_option("--allowlist", o.allowlist, "Descriptor allowlist, one per line (default: all)")
        ->check(input_path());
    pl->add_option("--cap", o.cap, "Documents per descriptor (default 2000)")->check(CLI::PositiveNumber);
    pl->add_option("--test-fraction", o.test_fraction, "Share of documents held out (default 0.05)")
        ->check(CLI::Range(0.0, 1.0));

    for (auto* sub : {p, a, e, s, sc, f, pl}) sub->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& ex) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& ex) {
        std::cerr << "error: " << ex.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
        return 1;
    }

    try {
        if (p->parsed()) return cmd_parse(o);
        if (a->parsed()) return cmd_augment(o);
        if (e->parsed()) return cmd_eval(o);
        if (s->parsed()) return cmd_spr(o);
        if (sc->parsed()) return cmd_schedule(o);
        if (f->parsed()) return cmd_efidf(o);
        if (pl->parsed()) return cmd_pipeline(o);
    } catch (const InputError& ex) {
        logger()->error("{}", ex.what());
        return 1;
    } catch (const Error& ex) {
        logger()->error("{}", ex.what());
        return 1;
    } catch (const Json::exception& ex) {
        logger()->error("{}", ex.what());
        return 1;
    } catch (const std::exception& ex) {
        logger()->error("internal error: {}", ex.what());
        return 2;
    }
    return 2;
}

}  // namespace etg::cli
