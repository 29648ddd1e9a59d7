#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "domset/dataset.hpp"

using namespace domset;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "domset_dataset_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

GenerateOptions small_er(int count, std::uint64_t seed) {
    GenerateOptions opt;
    opt.family = GraphFamily::ER;
    opt.count = count;
    opt.n_min = 5;
    opt.n_max = 12;
    opt.seed = seed;
    return opt;
}

}  // namespace

TEST(GenerateDataset, RespectsRangesAndLabels) {
    const Dataset ds = generate_dataset(small_er(40, 7));
    ASSERT_EQ(ds.size(), 40u);
    for (const auto& inst : ds.instances) {
        EXPECT_GE(inst.graph.vertex_count(), 5);
        EXPECT_LE(inst.graph.vertex_count(), 12);
        EXPECT_GE(inst.gamma, 1);
        EXPECT_LE(inst.gamma, inst.graph.vertex_count());
        EXPECT_GE(inst.gen.p, 0.0);
        EXPECT_LE(inst.gen.p, 1.0);
    }
}

TEST(GenerateDataset, LabelsMatchBruteForce) {
    const Dataset ds = generate_dataset(small_er(40, 11));
    for (const auto& inst : ds.instances)
        ASSERT_EQ(inst.gamma, domination_number_bruteforce(inst.graph).gamma) << inst.id;
}

TEST(GenerateDataset, DeterministicAcrossRunsAndJobs) {
    const std::string one = dataset_to_jsonl(generate_dataset(small_er(30, 5)));
    const std::string two = dataset_to_jsonl(generate_dataset(small_er(30, 5)));
    EXPECT_EQ(one, two);

    GenerateOptions parallel = small_er(30, 5);
    parallel.jobs = 3;
    EXPECT_EQ(dataset_to_jsonl(generate_dataset(parallel)), one);

    EXPECT_NE(dataset_to_jsonl(generate_dataset(small_er(30, 6))), one);
}

TEST(GenerateDataset, BaFamilyUsesFixedAttachment) {
    GenerateOptions opt;
    opt.family = GraphFamily::BA;
    opt.count = 20;
    opt.n_min = 5;
    opt.n_max = 10;
    opt.seed = 3;
    const Dataset ds = generate_dataset(opt);
    for (const auto& inst : ds.instances) {
        EXPECT_EQ(inst.gen.m, 2);
        EXPECT_EQ(inst.graph.edge_count(), 2 * (inst.graph.vertex_count() - 2));
    }
}

TEST(GenerateDataset, RejectsBadOptions) {
    GenerateOptions opt = small_er(0, 1);
    EXPECT_THROW(generate_dataset(opt), ParamError);
    opt = small_er(5, 1);
    opt.n_min = 10;
    opt.n_max = 8;
    EXPECT_THROW(generate_dataset(opt), ParamError);
    opt = small_er(5, 1);
    opt.family = GraphFamily::BA;
    opt.n_min = 2;  // m = 2 needs n > 2
    EXPECT_THROW(generate_dataset(opt), ParamError);
}

TEST(SplitDataset, StratifiedSharesWithinOneInstance) {
    // Ten instances of every size; 20% test should take 2 +- 1 per size.
    GenerateOptions opt = small_er(0, 2);
    Dataset ds;
    int index = 0;
    for (int n = 5; n <= 9; ++n)
        for (int k = 0; k < 10; ++k) {
            LabeledInstance inst;
            inst.id = "t-" + std::to_string(index++);
            inst.gen.family = GraphFamily::ER;
            inst.gen.n = n;
            inst.graph = erdos_renyi(n, 0.5, static_cast<std::uint64_t>(index));
            inst.gamma = domination_number(inst.graph).gamma;
            ds.instances.push_back(inst);
        }
    (void)opt;

    const DatasetSplit split = split_dataset(ds, 0.2, 0.1, 77);
    for (int n = 5; n <= 9; ++n) {
        const auto count_n = [n](const std::vector<LabeledInstance>& xs) {
            return std::count_if(xs.begin(), xs.end(), [n](const LabeledInstance& i) {
                return i.graph.vertex_count() == n;
            });
        };
        EXPECT_NEAR(static_cast<double>(count_n(split.test)), 2.0, 1.0) << "n=" << n;
        EXPECT_EQ(count_n(split.test) + count_n(split.val) + count_n(split.train), 10);
    }
}

TEST(SplitDataset, DisjointAndCovering) {
    const Dataset ds = generate_dataset(small_er(60, 13));
    const DatasetSplit split = split_dataset(ds, 0.2, 0.1, 5);
    EXPECT_EQ(split.train.size() + split.val.size() + split.test.size(), ds.size());

    std::set<std::string> ids;
    for (const auto* part : {&split.train, &split.val, &split.test})
        for (const auto& inst : *part) EXPECT_TRUE(ids.insert(inst.id).second) << inst.id;
    std::set<std::string> all;
    for (const auto& inst : ds.instances) all.insert(inst.id);
    EXPECT_EQ(ids, all);
}

TEST(SplitDataset, DeterministicInSeed) {
    const Dataset ds = generate_dataset(small_er(50, 21));
    const DatasetSplit a = split_dataset(ds, 0.2, 0.1, 9);
    const DatasetSplit b = split_dataset(ds, 0.2, 0.1, 9);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.val, b.val);
    EXPECT_EQ(a.test, b.test);
}

TEST(SplitDataset, RejectsEmptyAndBadFractions) {
    EXPECT_THROW(split_dataset(Dataset{}, 0.2, 0.1, 1), ParamError);
    const Dataset ds = generate_dataset(small_er(10, 1));
    EXPECT_THROW(split_dataset(ds, 0.0, 0.1, 1), ParamError);
    EXPECT_THROW(split_dataset(ds, 0.9, 0.2, 1), ParamError);
}

TEST(DatasetIo, RoundTripIdentity) {
    const Dataset ds = generate_dataset(small_er(100, 31));
    const auto path = temp_file("roundtrip.jsonl");
    save_dataset(ds, path.string());
    const Dataset loaded = load_dataset(path.string());
    ASSERT_EQ(loaded.size(), ds.size());
    EXPECT_EQ(loaded.instances, ds.instances);
}

TEST(DatasetIo, EmptyDatasetRoundTrips) {
    const auto path = temp_file("empty.jsonl");
    save_dataset(Dataset{}, path.string());
    EXPECT_TRUE(load_dataset(path.string()).empty());
}

TEST(DatasetIo, EdgesAreSortedInFile) {
    const Dataset ds = generate_dataset(small_er(5, 41));
    const std::string text = dataset_to_jsonl(ds);
    const auto line_end = text.find('\n');
    const std::string first_line = text.substr(0, line_end);
    const auto j = nlohmann::json::parse(first_line);
    std::pair<int, int> prev{-1, -1};
    for (const auto& e : j.at("edges")) {
        std::pair<int, int> cur{e[0].get<int>(), e[1].get<int>()};
        EXPECT_LT(cur.first, cur.second);
        EXPECT_LT(prev, cur);
        prev = cur;
    }
}

TEST(DatasetIo, MalformedLineReportsLineNumber) {
    const auto path = temp_file("malformed.jsonl");
    {
        std::ofstream out(path);
        out << instance_to_json(generate_dataset(small_er(1, 3)).instances[0]).dump() << "\n";
        out << "{not json\n";
    }
    try {
        (void)load_dataset(path.string());
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_EQ(e.line_number, 2);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(DatasetIo, HandWrittenTriangleVerifies) {
    const auto path = temp_file("triangle.jsonl");
    {
        std::ofstream out(path);
        out << R"({"id":"k3","family":"er","n":3,"p":1.0,"seed":0,)"
            << R"("edges":[[0,1],[0,2],[1,2]],"gamma":1})" << "\n";
    }
    const Dataset ds = load_dataset(path.string());
    ASSERT_EQ(ds.size(), 1u);
    EXPECT_EQ(ds.instances[0].gamma, 1);
    const VerifyReport report = verify_dataset(ds);
    EXPECT_EQ(report.checked, 1u);
    EXPECT_TRUE(report.mismatches.empty());
}

TEST(DatasetIo, GammaOutsideRangeRejected) {
    const auto path = temp_file("bad_gamma.jsonl");
    {
        std::ofstream out(path);
        out << R"({"id":"k3","family":"er","n":3,"p":1.0,"seed":0,)"
            << R"("edges":[[0,1],[0,2],[1,2]],"gamma":4})" << "\n";
    }
    EXPECT_THROW(load_dataset(path.string()), DataError);
}

TEST(VerifyDataset, CatchesCorruptedLabels) {
    Dataset ds = generate_dataset(small_er(10, 51));
    ds.instances[3].gamma = ds.instances[3].gamma == 1 ? 2 : 1;
    const VerifyReport report = verify_dataset(ds);
    ASSERT_EQ(report.mismatches.size(), 1u);
    EXPECT_NE(report.mismatches[0].find(ds.instances[3].id), std::string::npos);
}

#ifdef DOMSET_DATA_DIR
// The two golden files committed under data/ stay loadable, correctly
// labeled, and reproducible from their recorded generator parameters.
TEST(GoldenFiles, LoadVerifyAndRegenerate) {
    for (const char* name : {"golden_er.jsonl", "golden_ba.jsonl"}) {
        const std::string path = std::string(DOMSET_DATA_DIR) + "/" + name;
        const Dataset ds = load_dataset(path);
        ASSERT_EQ(ds.size(), 5u) << name;
        const VerifyReport report = verify_dataset(ds, 14, true);
        EXPECT_EQ(report.checked, ds.size());
        EXPECT_TRUE(report.mismatches.empty()) << name;
        for (const auto& inst : ds.instances)
            EXPECT_EQ(generate(inst.gen), inst.graph) << inst.id;
    }
}
#endif

TEST(VerifyDataset, FullModeCoversLargeInstances) {
    GenerateOptions opt = small_er(6, 61);
    opt.n_min = 20;
    opt.n_max = 24;
    const Dataset ds = generate_dataset(opt);
    const VerifyReport partial = verify_dataset(ds, 14, false);
    EXPECT_EQ(partial.checked, 0u);
    EXPECT_EQ(partial.skipped, 6u);
    const VerifyReport full = verify_dataset(ds, 14, true);
    EXPECT_EQ(full.checked, 6u);
    EXPECT_TRUE(full.mismatches.empty());
}
