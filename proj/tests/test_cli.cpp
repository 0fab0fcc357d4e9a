// Drives the installed binary end to end through its file interfaces.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <string>

#include "helpers.hpp"
#include "logens/io.hpp"
#include "logens/parser.hpp"
#include "synthetic.hpp"

using namespace logens;
using namespace testutil;
using nlohmann::json;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

CmdResult run_cli(const std::string& args, const TempDir& tmp, const std::string& tag) {
    const std::string out_path = tmp.file("stdout_" + tag);
    const std::string err_path = tmp.file("stderr_" + tag);
    const std::string cmd = std::string(LOGENS_CLI_PATH) + " " + args + " >" + out_path +
                            " 2>" + err_path;
    const int rc = std::system(cmd.c_str());
    CmdResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = read_file(out_path);
    r.err = read_file(err_path);
    return r;
}

}  // namespace

TEST_CASE("missing input files exit nonzero with a diagnostic on stderr") {
    TempDir tmp("cli_missing");
    const CmdResult r =
        run_cli("--out " + tmp.path().string() + " parse --input /nonexistent.log", tmp, "a");
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("error:") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("parse mines templates and emits the id stream") {
    TempDir tmp("cli_parse");
    write_file(tmp.file("raw.log"),
               "host1 Sent Block 12\n"
               "host1 Sent Block 99\n"
               "host2 Waiting to Receive\n"
               "host2 Sent Block 7\n");
    write_file(tmp.file("cfg.json"),
               R"x({"parser": {"column_regex": "(?<session>\\S+) (?<content>.+)"}})x");

    const CmdResult r = run_cli("--config " + tmp.file("cfg.json") + " --out " +
                                    tmp.path().string() + " parse --input " +
                                    tmp.file("raw.log"),
                                tmp, "parse");
    REQUIRE(r.exit_code == 0);

    const TemplateStore store = load_template_store(tmp.file("templates.tsv"));
    CHECK(store.size() == 2);  // "Sent Block <*>" and "Waiting to Receive"

    const auto stream = read_parsed_stream(tmp.file("stream.tsv"));
    REQUIRE(stream.size() == 4);
    CHECK(stream[0].session == "host1");
    CHECK(stream[0].id == stream[1].id);
    CHECK(stream[2].session == "host2");
    CHECK(stream[2].id != stream[0].id);
}

TEST_CASE("passthrough parse assigns ids in first-seen order") {
    TempDir tmp("cli_pass");
    write_file(tmp.file("calls.log"), "open\nread\nopen\nclose\nread\n");
    write_file(tmp.file("cfg.json"), R"({"parser": {"mode": "passthrough"}})");
    const CmdResult r = run_cli("--config " + tmp.file("cfg.json") + " --out " +
                                    tmp.path().string() + " parse --input " +
                                    tmp.file("calls.log"),
                                tmp, "pass");
    REQUIRE(r.exit_code == 0);
    const auto stream = read_parsed_stream(tmp.file("stream.tsv"));
    REQUIRE(stream.size() == 5);
    CHECK(stream[0].id == 0);
    CHECK(stream[1].id == 1);
    CHECK(stream[2].id == 0);
    CHECK(stream[3].id == 2);
    CHECK(stream[4].id == 1);
}

TEST_CASE("full pipeline on the planted-pattern corpus") {
    TempDir tmp("cli_e2e");
    const SyntheticData data = make_planted_dataset(600, 1100, 2024);
    write_sequence_file(data.train, tmp.file("raw_train.tsv"));
    // a third of the raw test set repeats training rows, removed by dedup
    std::vector<LabeledSequence> raw_test = data.test;
    for (std::size_t i = 0; i < 550; ++i) raw_test.push_back(data.train[i % 600]);
    write_sequence_file(raw_test, tmp.file("raw_test.tsv"));
    save_template_store(data.store, tmp.file("templates.tsv"));

    json cfg = {
        {"seed", 3},
        {"dedup", true},
        {"sampling", {{"strategy", "random"}, {"n", 500}}},
        {"ensemble",
         {{"knn_k", 2}, {"slfn_epochs", 150}, {"slfn_lr", 0.01}, {"cache", true}}},
        {"backend", {{"kind", "mock"}, {"rule", "contains:evt7"}}},
    };
    write_file(tmp.file("cfg.json"), cfg.dump());
    const std::string base =
        "--config " + tmp.file("cfg.json") + " --out " + tmp.path().string() + " ";

    // prepare: dedup + sample the 500-sequence training subset
    CmdResult r = run_cli(base + "prepare --train-in " + tmp.file("raw_train.tsv") +
                              " --test-in " + tmp.file("raw_test.tsv"),
                          tmp, "prep");
    REQUIRE(r.exit_code == 0);
    const json stats = json::parse(read_file(tmp.file("stats.json")));
    CHECK(stats.at("duplication_ratio").get<double>() ==
          doctest::Approx(550.0 / 1650.0).epsilon(1e-9));
    CHECK(stats.at("efficiency").at("d_count") == 500);
    CHECK(read_sequence_file(tmp.file("test.tsv")).size() == 1100);

    r = run_cli(base + "train --train " + tmp.file("train.tsv") + " --templates " +
                    tmp.file("templates.tsv") + " --export-finetune ft.jsonl",
                tmp, "train");
    REQUIRE(r.exit_code == 0);
    CHECK(read_file(tmp.file("models/meta.json")).find("vocab") != std::string::npos);

    std::ifstream ft(tmp.file("ft.jsonl"));
    std::size_t ft_lines = 0;
    std::string line;
    while (std::getline(ft, line)) ++ft_lines;
    CHECK(ft_lines == 500);

    r = run_cli(base + "detect --input " + tmp.file("test.tsv") + " --templates " +
                    tmp.file("templates.tsv"),
                tmp, "detect");
    REQUIRE(r.exit_code == 0);

    r = run_cli(base + "evaluate --pred " + tmp.file("detections.tsv") + " --truth " +
                    tmp.file("test.tsv"),
                tmp, "eval");
    REQUIRE(r.exit_code == 0);
    const json metrics = json::parse(read_file(tmp.file("metrics.json")));
    CHECK(metrics.at("f1").get<double>() >= 0.95);

    SUBCASE("detection output format") {
        std::ifstream det(tmp.file("detections.tsv"));
        std::string first;
        std::getline(det, first);
        // final<TAB>source<TAB>votes
        CHECK(first.find('\t') != std::string::npos);
        CHECK((first.substr(0, 1) == "0" || first.substr(0, 1) == "1"));
        CHECK(first.find("computed") != std::string::npos);
    }

    SUBCASE("reruns with the same seed are byte-identical") {
        TempDir tmp2("cli_e2e_rerun");
        const std::string base2 =
            "--config " + tmp.file("cfg.json") + " --out " + tmp2.path().string() + " ";
        REQUIRE(run_cli(base2 + "prepare --train-in " + tmp.file("raw_train.tsv") +
                            " --test-in " + tmp.file("raw_test.tsv"),
                        tmp2, "prep")
                    .exit_code == 0);
        CHECK(read_file(tmp2.file("train.tsv")) == read_file(tmp.file("train.tsv")));
        CHECK(read_file(tmp2.file("test.tsv")) == read_file(tmp.file("test.tsv")));

        REQUIRE(run_cli(base2 + "train --train " + tmp2.file("train.tsv") + " --templates " +
                            tmp.file("templates.tsv"),
                        tmp2, "train")
                    .exit_code == 0);
        CHECK(read_file(tmp2.file("models/slfn.model")) ==
              read_file(tmp.file("models/slfn.model")));

        REQUIRE(run_cli(base2 + "detect --input " + tmp2.file("test.tsv") + " --templates " +
                            tmp.file("templates.tsv"),
                        tmp2, "detect")
                    .exit_code == 0);
        CHECK(read_file(tmp2.file("detections.tsv")) ==
              read_file(tmp.file("detections.tsv")));

        // a different root seed draws a different training subset
        TempDir tmp3("cli_e2e_reseed");
        REQUIRE(run_cli("--config " + tmp.file("cfg.json") + " --seed 4 --out " +
                            tmp3.path().string() + " prepare --train-in " +
                            tmp.file("raw_train.tsv") + " --test-in " +
                            tmp.file("raw_test.tsv"),
                        tmp3, "prep_reseed")
                    .exit_code == 0);
        CHECK(read_file(tmp3.file("train.tsv")) != read_file(tmp.file("train.tsv")));
    }

    SUBCASE("warm cache snapshot yields cache hits on overlap") {
        // save a snapshot, then replay the same input with it preloaded
        json cfg2 = cfg;
        cfg2["cache_snapshot_out"] = "cache.tsv";
        write_file(tmp.file("cfg2.json"), cfg2.dump());
        const std::string base_snap =
            "--config " + tmp.file("cfg2.json") + " --out " + tmp.path().string() + " ";
        REQUIRE(run_cli(base_snap + "detect --input " + tmp.file("test.tsv") +
                            " --templates " + tmp.file("templates.tsv"),
                        tmp, "detect_snap")
                    .exit_code == 0);

        json cfg3 = cfg;
        cfg3["cache_snapshot_in"] = tmp.file("cache.tsv");
        write_file(tmp.file("cfg3.json"), cfg3.dump());
        REQUIRE(run_cli("--config " + tmp.file("cfg3.json") + " --out " +
                            tmp.path().string() + " detect --input " + tmp.file("test.tsv") +
                            " --templates " + tmp.file("templates.tsv") +
                            " --out-file warm.tsv --timing-out warm_timing.json",
                        tmp, "detect_warm")
                    .exit_code == 0);
        const json timing = json::parse(read_file(tmp.file("warm_timing.json")));
        // every test sequence was cached by the snapshot run
        CHECK(timing.at("computed").get<std::size_t>() == 0);
        CHECK(timing.at("cache_hits").get<std::size_t>() ==
              timing.at("sequences").get<std::size_t>());
    }

    SUBCASE("sequence injection is reported and stays label-safe") {
        std::string safe;
        for (int i = 0; i < 40; ++i)
            if (i != 7) safe += std::to_string(i) + "\n";
        write_file(tmp.file("safe.txt"), safe);

        json cfg_inj = cfg;
        cfg_inj["injection"] = {{"level", "sequence"},
                                {"ratio", 0.05},
                                {"shuffle_span", 3},
                                {"safe_templates", tmp.file("safe.txt")}};
        write_file(tmp.file("cfg_inj.json"), cfg_inj.dump());
        const CmdResult pr = run_cli(
            "--config " + tmp.file("cfg_inj.json") + " --out " + tmp.path().string() +
                " prepare --train-in " + tmp.file("raw_train.tsv") + " --test-in " +
                tmp.file("raw_test.tsv") + " --train-out inj_train.tsv --test-out " +
                "inj_test.tsv --stats-out inj_stats.json",
            tmp, "prep_inj");
        REQUIRE(pr.exit_code == 0);

        const json istats = json::parse(read_file(tmp.file("inj_stats.json")));
        // round(0.05 * 1650) pre-dedup test rows edited
        CHECK(istats.at("injection").at("edited") == 83);

        // the planted rule still labels every edited sequence correctly
        for (const LabeledSequence& ls : read_sequence_file(tmp.file("inj_test.tsv"))) {
            const bool has_planted =
                std::count(ls.sequence.template_ids.begin(),
                           ls.sequence.template_ids.end(), 7) > 0;
            CHECK((ls.label == Label::Anomalous) == has_planted);
        }
    }

    SUBCASE("template-level injection edits the store in place") {
        write_file(tmp.file("pool.txt"), "gamma delta epsilon\n");
        json cfg_t = cfg;
        cfg_t["injection"] = {{"level", "template"},
                              {"ratio", 0.25},
                              {"word_pool", tmp.file("pool.txt")}};
        write_file(tmp.file("cfg_t.json"), cfg_t.dump());
        const CmdResult pr = run_cli(
            "--config " + tmp.file("cfg_t.json") + " --out " + tmp.path().string() +
                " prepare --train-in " + tmp.file("raw_train.tsv") + " --test-in " +
                tmp.file("raw_test.tsv") + " --templates-in " + tmp.file("templates.tsv") +
                " --stats-out tstats.json --train-out t_train.tsv --test-out t_test.tsv",
            tmp, "prep_tmpl");
        REQUIRE(pr.exit_code == 0);

        const json tstats = json::parse(read_file(tmp.file("tstats.json")));
        CHECK(tstats.at("injection").at("edited") == 10);  // round(0.25 * 40)

        const TemplateStore before = load_template_store(tmp.file("templates.tsv"));
        const TemplateStore after =
            load_template_store(tmp.file("templates_injected.tsv"));
        REQUIRE(after.size() == before.size());
        std::size_t changed = 0;
        for (TemplateId id = 0; id < static_cast<TemplateId>(before.size()); ++id) {
            changed += after.get(id).tokens != before.get(id).tokens;
            CHECK(after.get(id).literal_count() >= 1);
        }
        CHECK(changed == 10);
    }

    SUBCASE("partial cache snapshot overlap matches a walking oracle") {
        json cfg_snap = cfg;
        cfg_snap["cache_snapshot_out"] = "full_cache.tsv";
        write_file(tmp.file("cfg_snap.json"), cfg_snap.dump());
        REQUIRE(run_cli("--config " + tmp.file("cfg_snap.json") + " --out " +
                            tmp.path().string() + " detect --input " + tmp.file("test.tsv") +
                            " --templates " + tmp.file("templates.tsv"),
                        tmp, "detect_full_snap")
                    .exit_code == 0);

        // keep only part of the snapshot
        std::ifstream full(tmp.file("full_cache.tsv"));
        std::string line, partial;
        for (int i = 0; i < 400 && std::getline(full, line); ++i) partial += line + "\n";
        write_file(tmp.file("partial_cache.tsv"), partial);

        json cfg_warm = cfg;
        cfg_warm["cache_snapshot_in"] = tmp.file("partial_cache.tsv");
        write_file(tmp.file("cfg_warm.json"), cfg_warm.dump());
        REQUIRE(run_cli("--config " + tmp.file("cfg_warm.json") + " --out " +
                            tmp.path().string() + " detect --input " + tmp.file("test.tsv") +
                            " --templates " + tmp.file("templates.tsv") +
                            " --out-file partial.tsv --timing-out partial_timing.json",
                        tmp, "detect_partial")
                    .exit_code == 0);

        // oracle: a row hits if its key is in the snapshot or repeats an
        // earlier non-snapshot row (which the run itself cached)
        std::set<std::vector<TemplateId>> snapshot, seen;
        for (const auto& ls : read_sequence_file(tmp.file("partial_cache.tsv")))
            snapshot.insert(ls.sequence.template_ids);
        std::size_t expected_hits = 0;
        for (const auto& ls : read_sequence_file(tmp.file("test.tsv"))) {
            if (snapshot.count(ls.sequence.template_ids) ||
                seen.count(ls.sequence.template_ids)) {
                ++expected_hits;
            } else {
                seen.insert(ls.sequence.template_ids);
            }
        }
        const json timing = json::parse(read_file(tmp.file("partial_timing.json")));
        CHECK(timing.at("cache_hits").get<std::size_t>() == expected_hits);
    }

    SUBCASE("evaluate rejects mismatched line counts") {
        write_file(tmp.file("short.tsv"), "0\t1 2 3\n");
        const CmdResult bad = run_cli(base + "evaluate --pred " +
                                          tmp.file("detections.tsv") + " --truth " +
                                          tmp.file("short.tsv"),
                                      tmp, "eval_bad");
        CHECK(bad.exit_code != 0);
        CHECK(bad.err.find("error:") != std::string::npos);
    }
}

TEST_CASE("session streams partition into labeled per-file sequences") {
    TempDir tmp("cli_sessions");
    std::string labels;
    for (int f = 0; f < 12; ++f) {
        std::string body;
        for (int i = 0; i < 20; ++i)
            body += "call_" + std::to_string((f * 7 + i * 3) % 9) + "\n";
        if (f % 4 == 0) body += "call_bad\n";
        const std::string name = "trace_" + std::to_string(f) + ".log";
        write_file(tmp.file(name), body);
        labels += name + "\t" + (f % 4 == 0 ? "1" : "0") + "\n";
    }
    write_file(tmp.file("labels.tsv"), labels);
    write_file(tmp.file("cfg.json"),
               R"({"parser": {"mode": "passthrough"},
                   "partition": {"mode": "session"},
                   "dedup": false, "seed": 1})");

    std::string inputs;
    for (int f = 0; f < 12; ++f) inputs += " " + tmp.file("trace_" + std::to_string(f) + ".log");
    const std::string base =
        "--config " + tmp.file("cfg.json") + " --out " + tmp.path().string() + " ";
    REQUIRE(run_cli(base + "parse --session-per-file --input" + inputs, tmp, "parse")
                .exit_code == 0);
    REQUIRE(run_cli(base + "prepare --stream " + tmp.file("stream.tsv") +
                        " --session-labels " + tmp.file("labels.tsv") +
                        " --test-fraction 0.25",
                    tmp, "prep")
                .exit_code == 0);

    const auto train = read_sequence_file(tmp.file("train.tsv"));
    const auto test = read_sequence_file(tmp.file("test.tsv"));
    CHECK(train.size() == 9);
    CHECK(test.size() == 3);
    std::size_t anomalous = 0;
    for (const auto& ls : train) anomalous += ls.label == Label::Anomalous;
    for (const auto& ls : test) anomalous += ls.label == Label::Anomalous;
    CHECK(anomalous == 3);  // files 0, 4, 8
}

TEST_CASE("window streams take labels from their anomalous messages") {
    TempDir tmp("cli_windows");
    std::string raw, mlabels;
    for (int i = 0; i < 23; ++i) {
        raw += "event_" + std::to_string(i % 4) + "\n";
        mlabels += (i == 7 || i == 21) ? "1\n" : "0\n";
    }
    write_file(tmp.file("raw.log"), raw);
    write_file(tmp.file("mlabels.txt"), mlabels);
    write_file(tmp.file("cfg.json"),
               R"({"parser": {"mode": "passthrough"},
                   "partition": {"mode": "window", "window": 5, "step": 5},
                   "dedup": false, "seed": 1})");

    const std::string base =
        "--config " + tmp.file("cfg.json") + " --out " + tmp.path().string() + " ";
    REQUIRE(run_cli(base + "parse --input " + tmp.file("raw.log"), tmp, "parse")
                .exit_code == 0);
    REQUIRE(run_cli(base + "prepare --stream " + tmp.file("stream.tsv") +
                        " --message-labels " + tmp.file("mlabels.txt") +
                        " --test-fraction 0.4",
                    tmp, "prep")
                .exit_code == 0);

    // windows at 0,5,10,15,20 -> lengths 5,5,5,5,3; messages 7 and 21 are
    // anomalous, so exactly two windows carry label 1
    const auto train = read_sequence_file(tmp.file("train.tsv"));
    const auto test = read_sequence_file(tmp.file("test.tsv"));
    CHECK(train.size() + test.size() == 5);
    std::size_t covered = 0, anomalous = 0;
    for (const auto& part : {train, test}) {
        for (const auto& ls : part) {
            covered += ls.sequence.template_ids.size();
            anomalous += ls.label == Label::Anomalous;
        }
    }
    CHECK(covered == 23);
    CHECK(anomalous == 2);
}

TEST_CASE("report aggregates runs and runs significance tests") {
    TempDir tmp("cli_report");
    auto metrics = [&](const std::string& name, double f1) {
        json j = {{"precision", f1}, {"recall", f1}, {"f1", f1},
                  {"n", 100},        {"tp", 1},      {"fp", 1},
                  {"fn", 1},         {"tn", 97}};
        write_file(tmp.file(name), j.dump());
    };
    metrics("a1.json", 0.70);
    metrics("a2.json", 0.71);
    metrics("a3.json", 0.72);
    metrics("b1.json", 0.43);
    metrics("b2.json", 0.44);
    metrics("b3.json", 0.42);

    json manifest = {{"methods",
                      {{"ours", {tmp.file("a1.json"), tmp.file("a2.json"), tmp.file("a3.json")}},
                       {"baseline",
                        {tmp.file("b1.json"), tmp.file("b2.json"), tmp.file("b3.json")}}}},
                     {"cache_memory_bytes", 12345}};
    write_file(tmp.file("manifest.json"), manifest.dump());

    const CmdResult r = run_cli("--out " + tmp.path().string() + " report --manifest " +
                                    tmp.file("manifest.json"),
                                tmp, "report");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("ours") != std::string::npos);
    CHECK(r.out.find("Mann-Whitney") != std::string::npos);
    CHECK(r.out.find("12345") != std::string::npos);

    const std::string csv = read_file(tmp.file("report.csv"));
    CHECK(csv.find("method,precision,recall,f1,runs") != std::string::npos);
    CHECK(csv.find("ours,") != std::string::npos);
    CHECK(csv.find("method_a,method_b,u,p_value,significant") != std::string::npos);
}
