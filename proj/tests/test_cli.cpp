// End-to-end tests that drive the installed CLI binary (path provided via the
// DOMSET_CLI environment variable by ctest).

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string output;  // stdout only
};

std::string cli_path() {
    const char* env = std::getenv("DOMSET_CLI");
    if (env) return env;
    return "build/tools/domset";  // manual runs from the repo root
}

RunResult run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    EXPECT_NE(pipe, nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

fs::path work_dir() {
    const auto dir = fs::temp_directory_path() / "domset_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_config(const fs::path& path, const fs::path& data, const std::string& model,
                  int max_epochs, int patience, int width) {
    nlohmann::json j{{"data", data.string()},   {"model", model},
                     {"max_epochs", max_epochs}, {"patience", patience},
                     {"batch_size", 8},          {"hidden_width", width},
                     {"val_frac", 0.2},          {"test_frac", 0.2},
                     {"seed", 5}};
    std::ofstream(path) << j.dump(2);
}

}  // namespace

TEST(Cli, SolvesInlineEdgeList) {
    const RunResult r = run("solve --edges 0-1,1-2,2-3");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("gamma=2"), std::string::npos) << r.output;
}

TEST(Cli, SolveBruteForceAgrees) {
    const RunResult r = run("solve --edges 0-1,1-2,2-3 --brute-force");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("gamma=2"), std::string::npos);
}

TEST(Cli, SolveRejectsGarbageEdges) {
    EXPECT_EQ(run("solve --edges nonsense").exit_code, 2);
    EXPECT_EQ(run("solve").exit_code, 2);
}

TEST(Cli, GenerateRejectsZeroCount) {
    EXPECT_EQ(run("generate --count 0 --out /tmp/unused.jsonl").exit_code, 2);
}

TEST(Cli, UnknownFlagsAreUsageErrors) {
    EXPECT_EQ(run("solve --edges 0-1 --frobnicate").exit_code, 2);
    EXPECT_EQ(run("no-such-command").exit_code, 2);
}

TEST(Cli, HelpListsSubcommands) {
    const RunResult r = run("--help");
    EXPECT_EQ(r.exit_code, 0);
    for (const char* sub : {"generate", "solve", "train", "eval", "ablate", "bench",
                            "crossdomain", "verify", "sweep"})
        EXPECT_NE(r.output.find(sub), std::string::npos) << sub;
}

TEST(Cli, GenerateIsByteIdenticalAcrossRuns) {
    const auto dir = work_dir();
    const auto a = dir / "gen_a.jsonl";
    const auto b = dir / "gen_b.jsonl";
    ASSERT_EQ(run("generate --family ba --count 12 --n-min 5 --n-max 10 --seed 3 --out " +
                  a.string()).exit_code, 0);
    ASSERT_EQ(run("generate --family ba --count 12 --n-min 5 --n-max 10 --seed 3 --out " +
                  b.string()).exit_code, 0);
    const std::string text = slurp(a);
    EXPECT_EQ(text, slurp(b));
    EXPECT_FALSE(text.empty());
}

TEST(Cli, VerifyFlagsCorruptedLabels) {
    const auto dir = work_dir();
    const auto data = dir / "verify.jsonl";
    ASSERT_EQ(run("generate --count 6 --n-min 5 --n-max 9 --seed 2 --out " + data.string())
                  .exit_code, 0);
    EXPECT_EQ(run("verify --data " + data.string()).exit_code, 0);

    // Flip one label.
    std::ifstream in(data);
    std::string line, all;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            auto j = nlohmann::json::parse(line);
            j["gamma"] = j["gamma"].get<int>() == 1 ? 2 : 1;
            line = j.dump();
            first = false;
        }
        all += line + "\n";
    }
    std::ofstream(data) << all;
    EXPECT_EQ(run("verify --data " + data.string()).exit_code, 3);
}

TEST(Cli, TrainEvalPipelineIsDeterministic) {
    const auto dir = work_dir();
    const auto data = dir / "pipeline.jsonl";
    ASSERT_EQ(run("generate --count 40 --n-min 5 --n-max 12 --seed 11 --out " + data.string())
                  .exit_code, 0);

    const auto config = dir / "gin.json";
    write_config(config, data, "gin", 4, 3, 12);

    const auto ckpt_a = dir / "gin_a.ckpt.json";
    const auto ckpt_b = dir / "gin_b.ckpt.json";
    ASSERT_EQ(run("train --config " + config.string() + " --out " + ckpt_a.string()).exit_code, 0);
    ASSERT_EQ(run("train --config " + config.string() + " --out " + ckpt_b.string()).exit_code, 0);
    EXPECT_EQ(slurp(ckpt_a), slurp(ckpt_b));
    EXPECT_EQ(slurp(ckpt_a.string() + ".history.csv"), slurp(ckpt_b.string() + ".history.csv"));

    const auto report_a = dir / "eval_a.json";
    const auto report_b = dir / "eval_b.json";
    ASSERT_EQ(run("eval --model " + ckpt_a.string() + " --data " + data.string() +
                  " --split test --json " + report_a.string()).exit_code, 0);
    ASSERT_EQ(run("eval --model " + ckpt_a.string() + " --data " + data.string() +
                  " --split test --json " + report_b.string()).exit_code, 0);
    EXPECT_EQ(slurp(report_a), slurp(report_b));
}

// eval on the val split with the training config reproduces the best val MAE
// recorded in the history CSV.
TEST(Cli, EvalReproducesTrainTimeValidationMetrics) {
    const auto dir = work_dir();
    const auto data = dir / "valcheck.jsonl";
    ASSERT_EQ(run("generate --count 30 --n-min 5 --n-max 10 --seed 21 --out " + data.string())
                  .exit_code, 0);
    const auto config = dir / "valcheck_gin.json";
    write_config(config, data, "gin", 5, 4, 12);
    const auto ckpt = dir / "valcheck.ckpt.json";
    ASSERT_EQ(run("train --config " + config.string() + " --out " + ckpt.string()).exit_code, 0);

    double best_val = 1e300;
    {
        std::ifstream hist(ckpt.string() + ".history.csv");
        std::string line;
        std::getline(hist, line);  // header
        while (std::getline(hist, line)) {
            const auto second_comma = line.find(',', line.find(',') + 1);
            best_val = std::min(best_val, std::stod(line.substr(second_comma + 1)));
        }
    }

    const auto report = dir / "valcheck_eval.json";
    ASSERT_EQ(run("eval --model " + ckpt.string() + " --data " + data.string() +
                  " --config " + config.string() + " --split val --json " + report.string())
                  .exit_code, 0);
    const auto j = nlohmann::json::parse(slurp(report));
    EXPECT_NEAR(j.at("overall").at("mae").get<double>(), best_val, 1e-9);
}

TEST(Cli, CnnTrainAndEvalRuns) {
    const auto dir = work_dir();
    const auto data = dir / "cnn_data.jsonl";
    ASSERT_EQ(run("generate --count 16 --n-min 5 --n-max 10 --seed 31 --out " + data.string())
                  .exit_code, 0);
    const auto config = dir / "cnn.json";
    write_config(config, data, "cnn", 2, 1, 64);
    const auto ckpt = dir / "cnn.ckpt.json";
    ASSERT_EQ(run("train --config " + config.string() + " --out " + ckpt.string()).exit_code, 0);
    const RunResult r = run("eval --model " + ckpt.string() + " --data " + data.string());
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("cnn-v1"), std::string::npos);
}

TEST(Cli, TrainRejectsConfigWithUnknownKeys) {
    const auto dir = work_dir();
    const auto config = dir / "bad.json";
    std::ofstream(config) << R"({"data": "x.jsonl", "model": "gin", "learning_rate": 0.1})";
    EXPECT_EQ(run("train --config " + config.string() + " --out /tmp/x.ckpt").exit_code, 3);
}

TEST(Cli, BenchRejectsWrongSizes) {
    const auto dir = work_dir();
    const auto data = dir / "bench_small.jsonl";
    ASSERT_EQ(run("generate --count 3 --n-min 10 --n-max 12 --seed 1 --out " + data.string())
                  .exit_code, 0);
    EXPECT_EQ(run("bench --data " + data.string() + " --trials 1").exit_code, 2);
}

TEST(Cli, BenchRunsOn64VertexGraphs) {
    const auto dir = work_dir();
    const auto data = dir / "bench64.jsonl";
    ASSERT_EQ(run("generate --count 2 --n-min 64 --n-max 64 --seed 9 --out " + data.string())
                  .exit_code, 0);
    const RunResult r = run("bench --data " + data.string() + " --trials 1");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("speedup"), std::string::npos);
}

TEST(Cli, SolveReadsGraphFile) {
    const auto dir = work_dir();
    const auto file = dir / "one_graph.json";
    std::ofstream(file) << R"({"n": 4, "edges": [[0,1],[1,2],[2,3]]})";
    const RunResult r = run("solve --graph " + file.string());
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("gamma=2"), std::string::npos);
}
