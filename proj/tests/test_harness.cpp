#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "commands.hpp"
#include "experiment.hpp"

using namespace scrambling::cli;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("scrambling_harness_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find("summary") == std::string::npos) out.push_back(line);
    }
    return out;
}

}  // namespace

TEST(Config, RoundTripsThroughText) {
    ExperimentConfig c;
    c.command = "decouple";
    c.model = "sequential";
    c.n = 40;
    c.t = 12345;
    c.f = 0.1 + 0.2;  // not exactly representable in short decimal
    c.c = 1.0 / 3.0;
    c.seed = 18446744073709551615ULL;
    c.p_minus = 0.6;
    c.out = "x.csv";
    c.threads = 4;
    EXPECT_EQ(ExperimentConfig::from_text(c.to_text()), c);
}

TEST(Config, FileFormatCommentsAndOverride) {
    ExperimentConfig c;
    c.merge_text("# header\nn = 12   # trailing\n\ntrials=3\n");
    EXPECT_EQ(c.n, 12u);
    EXPECT_EQ(c.trials, 3u);
    c.set("n", "20");
    EXPECT_EQ(c.n, 20u);
}

TEST(Config, RejectsBadInputNamingTheKey) {
    ExperimentConfig c;
    try {
        c.set("trials", "-3");
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("trials"), std::string::npos);
    }
    EXPECT_THROW(c.set("nonsense", "1"), std::invalid_argument);
    EXPECT_THROW(c.set("f", "0.1x"), std::invalid_argument);
    EXPECT_THROW(c.merge_text("n 12\n"), std::invalid_argument);
}

TEST(Config, HashCoversDataKeysOnly) {
    ExperimentConfig a;
    a.command = "scramble";
    a.n = 16;
    ExperimentConfig b = a;
    b.out = "elsewhere.csv";
    b.threads = 8;
    b.format = "json";
    EXPECT_EQ(a.hash(), b.hash());
    b.n = 17;
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 16u);
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Records, DoublesUseSeventeenDigitsAndRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) {
        const std::string s = format_double(v);
        EXPECT_EQ(std::stod(s), v);
    }
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(csv_cell(Value(std::string("a,b"))), "\"a,b\"");
    EXPECT_EQ(csv_cell(Value(std::string("q\"x"))), "\"q\"\"x\"");
    EXPECT_EQ(csv_cell(Value(true)), "true");
    EXPECT_EQ(csv_cell(Value(std::monostate{})), "");
}

TEST(Records, WriterRenamesOnFinishAndMarksAbort) {
    const auto dir = scratch_dir("writer");
    const auto path = (dir / "out.csv").string();
    std::ostringstream sink;
    {
        RecordWriter w(RecordWriter::Format::Csv, {"a", "b"}, path, sink);
        w.write(Record().add("a", uint64_t{1}).add("b", 0.5));
        EXPECT_TRUE(std::filesystem::exists(path + ".partial"));
        EXPECT_FALSE(std::filesystem::exists(path));
        w.finish();
    }
    EXPECT_EQ(slurp(path), "a,b\n1,0.5\n");
    EXPECT_FALSE(std::filesystem::exists(path + ".partial"));

    const auto broken = (dir / "broken.json").string();
    {
        RecordWriter w(RecordWriter::Format::Json, {"a"}, broken, sink);
        w.write(Record().add("a", uint64_t{1}));
        w.abort("boom");
    }
    EXPECT_FALSE(std::filesystem::exists(broken));
    const auto text = slurp(broken + ".partial");
    EXPECT_NE(text.find("\"incomplete\":true"), std::string::npos);
    EXPECT_NE(text.find("boom"), std::string::npos);
}

TEST(Records, OutputDirectoryFromEnvironment) {
    ::setenv("SCRAMBLING_OUTPUT_DIR", "/tmp/results", 1);
    EXPECT_EQ(resolve_output_path("r.csv"), "/tmp/results/r.csv");
    EXPECT_EQ(resolve_output_path("/abs/r.csv"), "/abs/r.csv");
    EXPECT_EQ(resolve_output_path(""), "");
    ::unsetenv("SCRAMBLING_OUTPUT_DIR");
    EXPECT_EQ(resolve_output_path("r.csv"), "r.csv");
}

TEST(Pool, EmitsInTrialOrderAndPropagatesErrors) {
    for (uint32_t threads : {1u, 2u, 5u}) {
        std::vector<uint64_t> seen;
        run_ordered(
            50, threads, [](uint64_t k) { return Record().add("k", k); },
            [&](const Record& r) { seen.push_back(std::get<uint64_t>(*r.find("k"))); });
        ASSERT_EQ(seen.size(), 50u);
        for (uint64_t k = 0; k < 50; ++k) EXPECT_EQ(seen[k], k);
    }
    std::atomic<int> emitted{0};
    EXPECT_THROW(run_ordered(
                     40, 3,
                     [](uint64_t k) {
                         if (k == 17) throw std::runtime_error("trial failed");
                         return Record();
                     },
                     [&](const Record&) { ++emitted; }),
                 std::runtime_error);
    EXPECT_LE(emitted.load(), 17);
}

TEST(Experiments, WeightchainIsOneJsonObject) {
    ExperimentConfig c;
    c.command = "weightchain";
    c.n = 64;
    c.from = 1;
    c.t = 20000;
    c.f = 0.1;
    std::ostringstream out;
    run_experiment(c, out);
    const auto text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
    const auto j = nlohmann::json::parse(text);
    EXPECT_TRUE(j.contains("tail_probability"));
    EXPECT_TRUE(j.contains("first_term"));
    EXPECT_EQ(j["config_hash"], c.hash());
    EXPECT_LE(j["tail_probability"].get<double>(), j["bound"].get<double>());
}

TEST(Experiments, DataRowsIndependentOfThreadCount) {
    ExperimentConfig c;
    c.command = "scramble";
    c.model = "sequential";
    c.n = 24;
    c.trials = 7;
    c.seed = 99;
    c.format = "csv";
    std::ostringstream one, many;
    run_experiment(c, one);
    c.threads = 3;
    run_experiment(c, many);
    EXPECT_EQ(data_lines(one.str()), data_lines(many.str()));
    EXPECT_EQ(data_lines(one.str()).size(), 8u);  // header + 7 trials
}

TEST(Experiments, InvalidConfigFailsBeforeWriting) {
    const auto dir = scratch_dir("invalid");
    ExperimentConfig c;
    c.command = "gap";
    c.n = 12;
    c.out = (dir / "g.json").string();
    std::ostringstream out;
    EXPECT_THROW(run_experiment(c, out), std::invalid_argument);
    EXPECT_TRUE(std::filesystem::is_empty(dir));
    c.command = "bogus";
    EXPECT_THROW(run_experiment(c, out), std::invalid_argument);
}

TEST(Verify, FastSuitePassesAndMutationIsCaught) {
    std::ostringstream out;
    EXPECT_EQ(run_verify({"fast", false}, out), 0) << out.str();
    std::ostringstream mutated;
    EXPECT_GE(run_verify({"fast", true}, mutated), 1);
    EXPECT_NE(mutated.str().find("FAIL weightchain-stationarity"), std::string::npos);
}
