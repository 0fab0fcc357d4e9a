// Command-line front end: parse raw logs into template-id streams, prepare
// train/test datasets (dedup, injection, sampling), train the ML base
// models, run ensemble detection against a chat backend, evaluate
// predictions and aggregate reports. Configuration comes from a JSON file
// with flag overrides; all randomness derives from one recorded root seed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "logens/backend.hpp"
#include "logens/dataset.hpp"
#include "logens/ensemble.hpp"
#include "logens/io.hpp"
#include "logens/knowledge_base.hpp"
#include "logens/metrics.hpp"
#include "logens/model_io.hpp"
#include "logens/parser.hpp"
#include "logens/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace logens;

namespace {

struct RunConfig {
    std::uint64_t seed = 0;
    std::string out_dir = ".";

    ParserConfig parser;
    std::string parser_mode = "drain";  // drain | passthrough
    std::string column_regex;           // named groups: header/content/session

    std::string partition_mode = "session";  // session | window | session_truncate
    std::size_t window = 50;
    std::size_t step = 50;
    std::size_t max_len = 30;

    bool dedup = true;

    double injection_ratio = 0.0;
    std::string injection_level = "sequence";
    std::size_t shuffle_span = 3;
    std::string safe_templates_path;
    std::string word_pool_path;

    std::string sampling_strategy;  // "", random, all_anomalous_plus_normal_fraction
    std::size_t sampling_n = 0;
    double sampling_fraction = 0.2;

    EnsembleConfig ensemble;
    int knn_k = 2;
    std::optional<int> dt_max_depth;
    int dt_min_samples_split = 2;
    SlfnTrainConfig slfn;

    PromptOptions prompt;
    RetryPolicy retry;
    BackendConfig backend;
    std::string kb_path;
    std::string cache_in;
    std::string cache_out;

    json raw;  // echoed into run manifests
};

RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_flag,
                      const std::string& out_flag) {
    RunConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw input_error("cannot open config: " + path);
        cfg.raw = json::parse(in);
    } else {
        cfg.raw = json::object();
    }
    const json& j = cfg.raw;

    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.out_dir = j.value("out", std::string("."));

    if (j.contains("parser")) {
        const json& p = j["parser"];
        cfg.parser_mode = p.value("mode", cfg.parser_mode);
        cfg.parser.tree_depth = p.value("tree_depth", cfg.parser.tree_depth);
        cfg.parser.similarity_threshold =
            p.value("similarity_threshold", cfg.parser.similarity_threshold);
        cfg.parser.max_children = p.value("max_children", cfg.parser.max_children);
        cfg.parser.numeric_masking = p.value("numeric_masking", cfg.parser.numeric_masking);
        cfg.column_regex = p.value("column_regex", cfg.column_regex);
    }
    if (j.contains("partition")) {
        const json& p = j["partition"];
        cfg.partition_mode = p.value("mode", cfg.partition_mode);
        cfg.window = p.value("window", cfg.window);
        cfg.step = p.value("step", cfg.step);
        cfg.max_len = p.value("max_len", cfg.max_len);
    }
    cfg.dedup = j.value("dedup", cfg.dedup);
    if (j.contains("injection")) {
        const json& p = j["injection"];
        cfg.injection_ratio = p.value("ratio", cfg.injection_ratio);
        cfg.injection_level = p.value("level", cfg.injection_level);
        cfg.shuffle_span = p.value("shuffle_span", cfg.shuffle_span);
        cfg.safe_templates_path = p.value("safe_templates", cfg.safe_templates_path);
        cfg.word_pool_path = p.value("word_pool", cfg.word_pool_path);
    }
    if (j.contains("sampling")) {
        const json& p = j["sampling"];
        cfg.sampling_strategy = p.value("strategy", cfg.sampling_strategy);
        cfg.sampling_n = p.value("n", cfg.sampling_n);
        cfg.sampling_fraction = p.value("fraction", cfg.sampling_fraction);
    }
    if (j.contains("ensemble")) {
        const json& p = j["ensemble"];
        cfg.ensemble.use_knn = p.value("use_knn", cfg.ensemble.use_knn);
        cfg.ensemble.use_dt = p.value("use_dt", cfg.ensemble.use_dt);
        cfg.ensemble.use_slfn = p.value("use_slfn", cfg.ensemble.use_slfn);
        cfg.ensemble.use_llm = p.value("use_llm", cfg.ensemble.use_llm);
        cfg.ensemble.rag_enabled = p.value("rag", cfg.ensemble.rag_enabled);
        cfg.ensemble.cache_enabled = p.value("cache", cfg.ensemble.cache_enabled);
        cfg.ensemble.parallelism = p.value("parallelism", cfg.ensemble.parallelism);
        cfg.ensemble.fail_soft = p.value("fail_soft", cfg.ensemble.fail_soft);
        cfg.knn_k = p.value("knn_k", cfg.knn_k);
        if (p.contains("dt_max_depth") && !p["dt_max_depth"].is_null())
            cfg.dt_max_depth = p["dt_max_depth"].get<int>();
        cfg.dt_min_samples_split = p.value("dt_min_samples_split", cfg.dt_min_samples_split);
        cfg.slfn.hidden = p.value("slfn_hidden", cfg.slfn.hidden);
        cfg.slfn.epochs = p.value("slfn_epochs", cfg.slfn.epochs);
        cfg.slfn.learning_rate = p.value("slfn_lr", cfg.slfn.learning_rate);
    }
    if (j.contains("prompt")) cfg.prompt.render_ids = j["prompt"].value("render_ids", false);
    if (j.contains("retry")) {
        const json& p = j["retry"];
        cfg.retry.base_temperature = p.value("base_temperature", cfg.retry.base_temperature);
        if (p.contains("ladder")) cfg.retry.ladder = p["ladder"].get<std::vector<double>>();
    }
    if (j.contains("backend")) {
        const json& p = j["backend"];
        cfg.backend.kind = p.value("kind", cfg.backend.kind);
        cfg.backend.rule = p.value("rule", cfg.backend.rule);
        cfg.backend.script_path = p.value("script", cfg.backend.script_path);
        cfg.backend.http.endpoint = p.value("endpoint", cfg.backend.http.endpoint);
        cfg.backend.http.model = p.value("model", cfg.backend.http.model);
        cfg.backend.http.token_env = p.value("token_env", cfg.backend.http.token_env);
        cfg.backend.http.timeout_seconds =
            p.value("timeout_seconds", cfg.backend.http.timeout_seconds);
    }
    cfg.kb_path = j.value("kb", cfg.kb_path);
    cfg.cache_in = j.value("cache_snapshot_in", cfg.cache_in);
    cfg.cache_out = j.value("cache_snapshot_out", cfg.cache_out);

    if (seed_flag) cfg.seed = *seed_flag;
    if (!out_flag.empty()) cfg.out_dir = out_flag;
    return cfg;
}

fs::path resolve_out(const RunConfig& cfg, const std::string& name) {
    fs::path p(name);
    if (p.is_absolute()) return p;
    return fs::path(cfg.out_dir) / p;
}

void write_run_manifest(const RunConfig& cfg, const std::string& command,
                        const std::vector<std::string>& outputs) {
    json m = {{"command", command}, {"seed", cfg.seed}, {"outputs", outputs},
              {"config", cfg.raw}};
    std::ofstream out(resolve_out(cfg, command + "_run.json"));
    out << m.dump(2) << '\n';
}

// std::regex has no named captures; translate (?<name>...) into positional
// groups and remember which index each name landed on.
struct ColumnRegex {
    std::regex re;
    std::map<std::string, int> group;  // header/content/session -> index
};

ColumnRegex compile_column_regex(const std::string& pattern) {
    std::string translated;
    std::map<std::string, int> groups;
    int index = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] == '\\' && i + 1 < pattern.size()) {
            translated += pattern[i];
            translated += pattern[i + 1];
            ++i;
            continue;
        }
        if (pattern[i] != '(') {
            translated += pattern[i];
            continue;
        }
        if (pattern.compare(i, 3, "(?<") == 0) {
            const auto close = pattern.find('>', i + 3);
            if (close == std::string::npos) throw config_error("unterminated (?<name> group");
            groups[pattern.substr(i + 3, close - i - 3)] = ++index;
            translated += '(';
            i = close;
        } else if (i + 1 < pattern.size() && pattern[i + 1] == '?') {
            translated += '(';  // non-capturing or assertion
        } else {
            ++index;
            translated += '(';
        }
    }
    ColumnRegex out;
    out.re = std::regex(translated);
    out.group = std::move(groups);
    return out;
}

std::vector<LogMessage> read_raw_messages(const std::vector<std::string>& files,
                                          const std::string& column_regex,
                                          bool session_per_file) {
    std::optional<ColumnRegex> cre;
    if (!column_regex.empty()) cre = compile_column_regex(column_regex);

    std::vector<LogMessage> messages;
    std::size_t arrival = 0;
    for (const std::string& file : files) {
        std::ifstream in(file);
        if (!in) throw input_error("cannot open input: " + file);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            LogMessage m;
            m.arrival_index = arrival++;
            if (cre) {
                std::smatch match;
                if (!std::regex_match(line, match, cre->re)) continue;
                auto pick = [&](const char* name) -> std::string {
                    auto it = cre->group.find(name);
                    if (it == cre->group.end()) return "";
                    return match[static_cast<std::size_t>(it->second)].str();
                };
                m.header = pick("header");
                m.content = pick("content");
                const std::string session = pick("session");
                if (!session.empty()) m.session_key = session;
                if (m.content.empty()) continue;
            } else {
                m.content = line;
            }
            if (session_per_file) m.session_key = fs::path(file).filename().string();
            messages.push_back(std::move(m));
        }
    }
    return messages;
}

// ---- subcommand bodies ----

int cmd_parse(const RunConfig& cfg, const std::vector<std::string>& inputs,
              bool session_per_file, const std::string& templates_out,
              const std::string& stream_out) {
    const std::vector<LogMessage> messages =
        read_raw_messages(inputs, cfg.column_regex, session_per_file);
    if (messages.empty()) throw input_error("no log messages read");

    TemplateMiner miner(cfg.parser);
    std::vector<ParsedRecord> stream;
    stream.reserve(messages.size());
    for (const LogMessage& m : messages) {
        ParsedRecord r;
        r.session = m.session_key.value_or("-");
        r.id = cfg.parser_mode == "passthrough" ? miner.parse_passthrough(m.content)
                                                : miner.parse_message(m.content).id;
        stream.push_back(std::move(r));
    }

    const fs::path tpath = resolve_out(cfg, templates_out);
    const fs::path spath = resolve_out(cfg, stream_out);
    save_template_store(miner.store(), tpath.string());
    write_parsed_stream(stream, spath.string());
    write_run_manifest(cfg, "parse", {tpath.string(), spath.string()});
    std::cerr << "parsed " << messages.size() << " messages into " << miner.store().size()
              << " templates\n";
    return 0;
}

std::map<std::string, Label> read_session_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open session labels: " + path);
    std::map<std::string, Label> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw input_error(path + ": expected session<TAB>label");
        labels[line.substr(0, tab)] = label_from_int(std::stoi(line.substr(tab + 1)));
    }
    return labels;
}

std::vector<Label> read_message_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open message labels: " + path);
    std::vector<Label> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        labels.push_back(label_from_int(std::stoi(line)));
    }
    return labels;
}

std::vector<LabeledSequence> sequences_from_stream(const RunConfig& cfg,
                                                   const std::string& stream_path,
                                                   const std::string& session_labels_path,
                                                   const std::string& message_labels_path) {
    const std::vector<ParsedRecord> stream = read_parsed_stream(stream_path);
    std::vector<LabeledSequence> out;

    if (cfg.partition_mode == "session" || cfg.partition_mode == "session_truncate") {
        if (session_labels_path.empty())
            throw input_error("session partitioning requires --session-labels");
        const auto labels = read_session_labels(session_labels_path);
        std::vector<LogMessage> messages(stream.size());
        for (std::size_t i = 0; i < stream.size(); ++i) {
            messages[i].content = std::to_string(stream[i].id);
            if (stream[i].session != "-") messages[i].session_key = stream[i].session;
            messages[i].arrival_index = i;
        }
        std::vector<LogSequence> seqs = partition_by_session(
            messages, [&](const LogMessage& m) { return std::stoi(m.content); });
        if (cfg.partition_mode == "session_truncate")
            seqs = truncate_sessions(std::move(seqs), cfg.max_len);
        for (LogSequence& s : seqs) {
            auto it = labels.find(s.origin.session_key);
            if (it == labels.end())
                throw input_error("no label for session '" + s.origin.session_key + "'");
            out.push_back({std::move(s), it->second});
        }
    } else if (cfg.partition_mode == "window") {
        if (message_labels_path.empty())
            throw input_error("window partitioning requires --message-labels");
        const std::vector<Label> mlabels = read_message_labels(message_labels_path);
        if (mlabels.size() != stream.size())
            throw input_error("message label count does not match stream length");
        std::vector<TemplateId> ids(stream.size());
        for (std::size_t i = 0; i < stream.size(); ++i) ids[i] = stream[i].id;
        // A window is anomalous iff it covers at least one anomalous message.
        for (LogSequence& s : partition_sliding_window(ids, cfg.window, cfg.step)) {
            Label l = Label::Normal;
            const std::size_t start = s.origin.window_start;
            for (std::size_t k = 0; k < s.template_ids.size(); ++k)
                if (mlabels[start + k] == Label::Anomalous) l = Label::Anomalous;
            out.push_back({std::move(s), l});
        }
    } else {
        throw config_error("unknown partition mode: " + cfg.partition_mode);
    }
    return out;
}

int cmd_prepare(const RunConfig& cfg, const std::string& stream_path,
                const std::string& session_labels, const std::string& message_labels,
                const std::string& train_in, const std::string& test_in,
                double test_fraction, const std::string& templates_in,
                const std::string& templates_out, const std::string& train_out,
                const std::string& test_out, const std::string& stats_out) {
    std::vector<LabeledSequence> train, test;

    if (!train_in.empty() || !test_in.empty()) {
        if (train_in.empty() || test_in.empty())
            throw input_error("--train-in and --test-in must be given together");
        train = read_sequence_file(train_in);
        test = read_sequence_file(test_in);
    } else {
        if (stream_path.empty())
            throw input_error("prepare needs either --stream or --train-in/--test-in");
        std::vector<LabeledSequence> all =
            sequences_from_stream(cfg, stream_path, session_labels, message_labels);
        if (test_fraction <= 0.0 || test_fraction >= 1.0)
            throw input_error("--test-fraction must be in (0,1) when partitioning a stream");
        SeededRng rng(stage_seed(cfg.seed, "split"));
        std::vector<std::size_t> order(all.size());
        for (std::size_t i = 0; i < all.size(); ++i) order[i] = i;
        rng.shuffle(order);
        const auto n_test = static_cast<std::size_t>(test_fraction *
                                                     static_cast<double>(all.size()));
        for (std::size_t i = 0; i < all.size(); ++i)
            (i < n_test ? test : train).push_back(all[order[i]]);
    }

    json stats = {{"seed", cfg.seed},
                  {"train_size", train.size()},
                  {"test_size", test.size()}};

    if (cfg.injection_ratio > 0.0 && cfg.injection_level == "sequence") {
        InjectionSpec spec;
        spec.level = InjectionSpec::Level::Sequence;
        spec.ratio = cfg.injection_ratio;
        spec.seed = stage_seed(cfg.seed, "injection");
        spec.shuffle_span = cfg.shuffle_span;
        if (cfg.safe_templates_path.empty())
            throw input_error("sequence injection requires a safe-template list file");
        for (TemplateId id : read_safe_template_ids(cfg.safe_templates_path))
            spec.safe_template_ids.insert(id);

        LabeledDataset ds("prepare");
        ds.set_train(train);
        ds.set_test(std::move(test));
        auto [injected, report] = inject_sequence_changes(ds, spec);
        test = injected.test();
        stats["injection"] = {{"seed", report.seed},       {"ratio", report.ratio},
                              {"level", report.level},     {"edited", report.edited},
                              {"removed", report.removed}, {"duplicated", report.duplicated},
                              {"shuffled", report.shuffled},
                              {"skipped_uneditable", report.skipped_uneditable}};
    }

    if (cfg.injection_ratio > 0.0 && cfg.injection_level == "template") {
        if (templates_in.empty())
            throw input_error("template injection requires --templates-in");
        if (cfg.word_pool_path.empty())
            throw input_error("template injection requires a word-pool file");
        InjectionSpec spec;
        spec.level = InjectionSpec::Level::Template;
        spec.ratio = cfg.injection_ratio;
        spec.seed = stage_seed(cfg.seed, "injection");
        auto [store, report] = inject_template_changes(
            load_template_store(templates_in), spec, read_word_pool(cfg.word_pool_path));
        save_template_store(store, resolve_out(cfg, templates_out).string());
        stats["injection"] = {{"seed", report.seed},
                              {"ratio", report.ratio},
                              {"level", report.level},
                              {"edited", report.edited},
                              {"word_added", report.word_added},
                              {"word_removed", report.word_removed},
                              {"word_replaced", report.word_replaced},
                              {"skipped_uneditable", report.skipped_uneditable}};
    }

    if (cfg.dedup) {
        DedupResult r = deduplicate(test, train);
        stats["duplication_ratio"] = r.duplication_ratio;
        stats["dedup_removed"] = test.size() - r.dedup_test.size();
        test = std::move(r.dedup_test);
    }

    const std::vector<LabeledSequence> full_train = train;
    if (!cfg.sampling_strategy.empty()) {
        SamplingStrategy strat;
        if (cfg.sampling_strategy == "random") {
            strat.kind = SamplingStrategy::Kind::Random;
            strat.n = cfg.sampling_n;
        } else if (cfg.sampling_strategy == "all_anomalous_plus_normal_fraction") {
            strat.kind = SamplingStrategy::Kind::AllAnomalousPlusNormalFraction;
            strat.fraction = cfg.sampling_fraction;
        } else {
            throw config_error("unknown sampling strategy: " + cfg.sampling_strategy);
        }
        train = sample_training_subset(train, strat, stage_seed(cfg.seed, "sampling"));
        const EfficiencyStats eff = compute_data_efficiency(train, full_train);
        stats["efficiency"] = {{"d_count", eff.d_count},
                               {"u_count", eff.u_count},
                               {"u_pct", eff.u_pct},
                               {"delta_u_pct", eff.delta_u_pct}};
    }

    const fs::path trp = resolve_out(cfg, train_out);
    const fs::path tep = resolve_out(cfg, test_out);
    const fs::path stp = resolve_out(cfg, stats_out);
    write_sequence_file(train, trp.string());
    write_sequence_file(test, tep.string());
    std::ofstream(stp) << stats.dump(2) << '\n';
    write_run_manifest(cfg, "prepare", {trp.string(), tep.string(), stp.string()});
    std::cerr << "prepared train=" << train.size() << " test=" << test.size() << "\n";
    return 0;
}

Eigen::Index vocab_from(const std::string& templates_path,
                        const std::vector<LabeledSequence>& train) {
    if (!templates_path.empty())
        return static_cast<Eigen::Index>(load_template_store(templates_path).size());
    TemplateId max_id = 0;
    for (const LabeledSequence& ls : train)
        for (TemplateId id : ls.sequence.template_ids) max_id = std::max(max_id, id);
    return static_cast<Eigen::Index>(max_id) + 1;
}

int cmd_train(const RunConfig& cfg, const std::string& train_path,
              const std::string& templates_path, const std::string& models_dir,
              const std::string& finetune_out) {
    const std::vector<LabeledSequence> train = read_sequence_file(train_path);
    if (train.empty()) throw input_error("training set is empty");

    const Eigen::Index vocab = vocab_from(templates_path, train);
    FeatureEncoder encoder(vocab);
    const FeatureMatrix x = encoder.encode_all(train);
    const Eigen::VectorXi y = labels_of(train);

    const fs::path dir = resolve_out(cfg, models_dir);
    fs::create_directories(dir);
    std::vector<std::string> outputs;

    json meta = {{"vocab", vocab}, {"seed", cfg.seed}, {"train_size", train.size()}};
    std::vector<std::string> kinds;

    if (cfg.ensemble.use_knn) {
        save_knn(train_knn(x, y, cfg.knn_k), (dir / "knn.model").string());
        kinds.push_back("knn");
    }
    if (cfg.ensemble.use_dt) {
        save_dt(train_dt(x, y, cfg.dt_max_depth, cfg.dt_min_samples_split),
                (dir / "dt.model").string());
        kinds.push_back("dt");
    }
    if (cfg.ensemble.use_slfn) {
        SlfnTrainConfig sc = cfg.slfn;
        sc.seed = stage_seed(cfg.seed, "slfn");
        save_slfn(train_slfn(x, y, sc), (dir / "slfn.model").string());
        kinds.push_back("slfn");
    }
    meta["models"] = kinds;
    std::ofstream(dir / "meta.json") << meta.dump(2) << '\n';
    outputs.push_back((dir / "meta.json").string());

    if (!finetune_out.empty()) {
        if (templates_path.empty() && !cfg.prompt.render_ids)
            throw input_error("fine-tune export needs --templates (or prompt.render_ids)");
        TemplateStore store;
        if (!templates_path.empty()) {
            store = load_template_store(templates_path);
        } else {
            for (Eigen::Index i = 0; i < vocab; ++i) store.add({std::to_string(i)});
        }
        KnowledgeBase kb;
        if (!cfg.kb_path.empty()) kb = KnowledgeBase::load(cfg.kb_path);
        PromptOptions opts = cfg.prompt;
        opts.rag_enabled = cfg.ensemble.rag_enabled;
        const fs::path ftp = resolve_out(cfg, finetune_out);
        write_finetune_jsonl(export_finetune_dataset(train, store, kb, opts), ftp.string());
        outputs.push_back(ftp.string());
    }

    write_run_manifest(cfg, "train", outputs);
    std::cerr << "trained " << kinds.size() << " model(s), vocab=" << vocab << "\n";
    return 0;
}

int cmd_detect(const RunConfig& cfg, const std::string& input_path,
               const std::string& models_dir, const std::string& templates_path,
               const std::string& detections_out, const std::string& timing_out) {
    const std::vector<LabeledSequence> input = read_sequence_file(input_path);

    TemplateStore store;
    if (!templates_path.empty()) {
        store = load_template_store(templates_path);
    } else {
        TemplateId max_id = 0;
        for (const LabeledSequence& ls : input)
            for (TemplateId id : ls.sequence.template_ids) max_id = std::max(max_id, id);
        for (TemplateId i = 0; i <= max_id; ++i) store.add({std::to_string(i)});
    }

    const fs::path dir = resolve_out(cfg, models_dir);
    std::ifstream meta_in(dir / "meta.json");
    if (!meta_in) throw input_error("cannot open models meta: " + (dir / "meta.json").string());
    const json meta = json::parse(meta_in);
    FeatureEncoder encoder(meta.at("vocab").get<Eigen::Index>());

    KnowledgeBase kb;
    if (!cfg.kb_path.empty()) kb = KnowledgeBase::load(cfg.kb_path);

    DetectionPipeline pipeline(cfg.ensemble, store, encoder, std::move(kb), cfg.prompt,
                               cfg.retry);
    if (cfg.ensemble.use_knn) pipeline.set_knn(load_knn((dir / "knn.model").string()));
    if (cfg.ensemble.use_dt) pipeline.set_dt(load_dt((dir / "dt.model").string()));
    if (cfg.ensemble.use_slfn) pipeline.set_slfn(load_slfn((dir / "slfn.model").string()));
    if (cfg.ensemble.use_llm) pipeline.set_backend(make_backend(cfg.backend));
    if (!cfg.cache_in.empty()) pipeline.cache().load_snapshot(cfg.cache_in);

    std::vector<LogSequence> seqs;
    seqs.reserve(input.size());
    for (const LabeledSequence& ls : input) seqs.push_back(ls.sequence);

    const BatchResult result = pipeline.detect_batch(seqs);

    if (!cfg.cache_out.empty())
        pipeline.cache().save_snapshot(resolve_out(cfg, cfg.cache_out).string());

    const fs::path dpath = resolve_out(cfg, detections_out);
    write_detection_output(result.records, dpath.string());

    std::size_t hits = 0;
    for (const VoteRecord& r : result.records) hits += (r.source == VoteSource::CacheHit);
    json timing = {{"seed", cfg.seed},
                   {"sequences", result.records.size()},
                   {"cache_hits", hits},
                   {"computed", result.records.size() - hits},
                   {"total_seconds", result.timing.total_seconds},
                   {"mean_seconds_per_sequence", result.timing.mean_seconds},
                   {"cache_seconds", result.timing.cache_seconds},
                   {"cache_memory_bytes", pipeline.cache().memory_usage_bytes()},
                   {"errors", result.errors.size()}};
    const fs::path tpath = resolve_out(cfg, timing_out);
    std::ofstream(tpath) << timing.dump(2) << '\n';
    write_run_manifest(cfg, "detect", {dpath.string(), tpath.string()});
    std::cerr << "detected " << result.records.size() << " sequences (" << hits
              << " cache hits)\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& pred_path,
                 const std::string& truth_path, const std::string& metrics_out) {
    const std::vector<Label> preds = read_prediction_labels(pred_path);
    std::vector<Label> truth;
    for (const LabeledSequence& ls : read_sequence_file(truth_path))
        truth.push_back(ls.label);

    const Confusion c = confusion(preds, truth);
    const Prf1 m = precision_recall_f1(c);

    json out = {{"seed", cfg.seed},
                {"n", c.total()},
                {"tp", c.tp},
                {"fp", c.fp},
                {"fn", c.fn},
                {"tn", c.tn},
                {"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1}};
    const fs::path mpath = resolve_out(cfg, metrics_out);
    std::ofstream(mpath) << out.dump(2) << '\n';
    write_run_manifest(cfg, "evaluate", {mpath.string()});
    std::cout << "n=" << c.total() << " tp=" << c.tp << " fp=" << c.fp << " fn=" << c.fn
              << " tn=" << c.tn << " precision=" << m.precision << " recall=" << m.recall
              << " f1=" << m.f1 << "\n";
    return 0;
}

int cmd_report(const RunConfig& cfg, const std::string& manifest_path,
               const std::string& report_out) {
    std::ifstream in(manifest_path);
    if (!in) throw input_error("cannot open report manifest: " + manifest_path);
    const json manifest = json::parse(in);

    // methods: {name: [metrics.json, ...]} with per-run f1 samples
    std::map<std::string, std::vector<double>> f1;
    std::map<std::string, Prf1> mean;
    for (const auto& [name, files] : manifest.at("methods").items()) {
        Prf1 acc;
        for (const auto& f : files) {
            std::ifstream min(f.get<std::string>());
            if (!min) throw input_error("cannot open metrics: " + f.get<std::string>());
            const json j = json::parse(min);
            f1[name].push_back(j.at("f1").get<double>());
            acc.precision += j.at("precision").get<double>();
            acc.recall += j.at("recall").get<double>();
            acc.f1 += j.at("f1").get<double>();
        }
        if (f1[name].empty()) throw input_error("method '" + name + "' lists no runs");
        const auto n = static_cast<double>(f1[name].size());
        mean[name] = {acc.precision / n, acc.recall / n, acc.f1 / n};
    }

    std::ostringstream text;
    std::ostringstream csv;
    csv << "method,precision,recall,f1,runs\n";
    text << "== per-method means ==\n";
    for (const auto& [name, m] : mean) {
        text << name << ": P=" << m.precision << " R=" << m.recall << " F1=" << m.f1
             << " (" << f1[name].size() << " runs)\n";
        csv << name << ',' << m.precision << ',' << m.recall << ',' << m.f1 << ','
            << f1[name].size() << '\n';
    }

    text << "\n== Mann-Whitney U (two-sided, alpha=" << kSignificanceAlpha
         << ") on F1 samples ==\n";
    csv << "\nmethod_a,method_b,u,p_value,significant\n";
    for (auto a = f1.begin(); a != f1.end(); ++a) {
        for (auto b = std::next(a); b != f1.end(); ++b) {
            const UTestResult r = mann_whitney_u(a->second, b->second);
            text << a->first << " vs " << b->first << ": U=" << r.u_statistic
                 << " p=" << r.p_value << (r.significant ? " (significant)" : "") << "\n";
            csv << a->first << ',' << b->first << ',' << r.u_statistic << ',' << r.p_value
                << ',' << (r.significant ? 1 : 0) << '\n';
        }
    }

    for (const char* block : {"efficiency", "timing"}) {
        if (!manifest.contains(block)) continue;
        std::ifstream bin(manifest.at(block).get<std::string>());
        if (!bin) throw input_error("cannot open " + std::string(block) + " file");
        text << "\n== " << block << " ==\n" << json::parse(bin).dump(2) << "\n";
    }
    if (manifest.contains("cache_memory_bytes"))
        text << "\ncache memory estimate: "
             << manifest.at("cache_memory_bytes").get<std::size_t>() << " bytes\n";

    const fs::path rpath = resolve_out(cfg, report_out);
    std::ofstream(rpath) << csv.str();
    write_run_manifest(cfg, "report", {rpath.string()});
    std::cout << text.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ensemble anomaly detection over evolving log template sequences"};
    app.require_subcommand(1);

    std::string config_path, out_flag;
    std::optional<std::uint64_t> seed_flag;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--seed", seed_flag, "root seed override");
    app.add_option("--out", out_flag, "output directory override");

    auto* parse = app.add_subcommand("parse", "mine templates from raw log files");
    std::vector<std::string> parse_inputs;
    bool session_per_file = false;
    std::string templates_out = "templates.tsv", stream_out = "stream.tsv";
    parse->add_option("--input", parse_inputs, "raw log files")->required();
    parse->add_flag("--session-per-file", session_per_file,
                    "use each file name as the session key");
    parse->add_option("--templates-out", templates_out, "template store output");
    parse->add_option("--stream-out", stream_out, "parsed id stream output");

    auto* prepare = app.add_subcommand("prepare", "partition, dedup, inject and sample");
    std::string stream_path, session_labels, message_labels, train_in, test_in;
    std::string prep_templates_in, prep_templates_out = "templates_injected.tsv";
    std::string train_out = "train.tsv", test_out = "test.tsv", stats_out = "stats.json";
    double test_fraction = 0.3;
    prepare->add_option("--stream", stream_path, "parsed id stream");
    prepare->add_option("--session-labels", session_labels, "session<TAB>label file");
    prepare->add_option("--message-labels", message_labels, "one 0/1 label per message");
    prepare->add_option("--train-in", train_in, "pre-split canonical training file");
    prepare->add_option("--test-in", test_in, "pre-split canonical testing file");
    prepare->add_option("--test-fraction", test_fraction, "test share when splitting");
    prepare->add_option("--templates-in", prep_templates_in,
                        "template store for template-level injection");
    prepare->add_option("--templates-out", prep_templates_out,
                        "edited template store output");
    prepare->add_option("--train-out", train_out, "training output file");
    prepare->add_option("--test-out", test_out, "testing output file");
    prepare->add_option("--stats-out", stats_out, "statistics JSON output");

    auto* train = app.add_subcommand("train", "fit the ML base models");
    std::string train_path, templates_path, models_dir = "models", finetune_out;
    train->add_option("--train", train_path, "canonical training file")->required();
    train->add_option("--templates", templates_path, "template store (sizes the vocabulary)");
    train->add_option("--models-out", models_dir, "model directory");
    train->add_option("--export-finetune", finetune_out, "fine-tune JSONL output");

    auto* detect = app.add_subcommand("detect", "run ensemble detection");
    std::string detect_input, detect_models = "models", detect_templates;
    std::string detections_out = "detections.tsv", timing_out = "timing.json";
    detect->add_option("--input", detect_input, "canonical sequence file")->required();
    detect->add_option("--models", detect_models, "model directory");
    detect->add_option("--templates", detect_templates, "template store");
    detect->add_option("--out-file", detections_out, "detection output");
    detect->add_option("--timing-out", timing_out, "timing summary output");

    auto* evaluate = app.add_subcommand("evaluate", "score predictions against ground truth");
    std::string pred_path, truth_path, metrics_out = "metrics.json";
    evaluate->add_option("--pred", pred_path, "detection output or label file")->required();
    evaluate->add_option("--truth", truth_path, "canonical labeled file")->required();
    evaluate->add_option("--metrics-out", metrics_out, "metrics JSON output");

    auto* report = app.add_subcommand("report", "aggregate runs and significance tests");
    std::string manifest_path, report_out = "report.csv";
    report->add_option("--manifest", manifest_path, "report manifest JSON")->required();
    report->add_option("--out-file", report_out, "CSV output");

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = load_config(config_path, seed_flag, out_flag);
        fs::create_directories(cfg.out_dir);
        if (*parse)
            return cmd_parse(cfg, parse_inputs, session_per_file, templates_out, stream_out);
        if (*prepare)
            return cmd_prepare(cfg, stream_path, session_labels, message_labels, train_in,
                               test_in, test_fraction, prep_templates_in, prep_templates_out,
                               train_out, test_out, stats_out);
        if (*train) return cmd_train(cfg, train_path, templates_path, models_dir, finetune_out);
        if (*detect)
            return cmd_detect(cfg, detect_input, detect_models, detect_templates,
                              detections_out, timing_out);
        if (*evaluate) return cmd_evaluate(cfg, pred_path, truth_path, metrics_out);
        if (*report) return cmd_report(cfg, manifest_path, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
