#include <gtest/gtest.h>

#include <cmath>

#include "domset/metrics.hpp"
#include "domset/rng.hpp"

using namespace domset;

TEST(Metrics, PerfectPredictions) {
    const Metrics m = compute_metrics({1, 2, 3}, {1, 2, 3});
    EXPECT_EQ(m.mae, 0.0);
    EXPECT_EQ(m.rmse, 0.0);
    EXPECT_EQ(m.r2, 1.0);
    EXPECT_TRUE(m.r2_defined);
}

TEST(Metrics, ConstantMeanPredictorScoresZeroR2) {
    const std::vector<double> targets{1, 2, 3, 6};
    const double mean = 3.0;
    const Metrics m = compute_metrics({mean, mean, mean, mean}, targets);
    EXPECT_NEAR(m.r2, 0.0, 1e-15);
}

// Independent scalar computation: errors (0, 0, 1), targets mean 2,
// SST = (1-2)^2 + (2-2)^2 + (3-2)^2 = 2, so R^2 = 1 - 1/2.
TEST(Metrics, HandComputedExample) {
    const Metrics m = compute_metrics({1, 2, 4}, {1, 2, 3});
    EXPECT_NEAR(m.mae, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(m.rmse, std::sqrt(1.0 / 3.0), 1e-15);
    EXPECT_NEAR(m.r2, 0.5, 1e-15);
}

TEST(Metrics, RejectsBadInputs) {
    EXPECT_THROW(compute_metrics({1, 2}, {1}), ParamError);
    EXPECT_THROW(compute_metrics({}, {}), ParamError);
}

TEST(Metrics, ConstantTargetsFlagUndefinedR2) {
    const Metrics m = compute_metrics({1.5, 2.0}, {2, 2});
    EXPECT_FALSE(m.r2_defined);
}

TEST(Metrics, RmseDominatesMae) {
    Xoshiro256 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> preds, targets;
        const int n = rng.next_int(2, 40);
        for (int i = 0; i < n; ++i) {
            preds.push_back(10 * rng.next_double());
            targets.push_back(10 * rng.next_double());
        }
        const Metrics m = compute_metrics(preds, targets);
        EXPECT_GE(m.rmse, m.mae - 1e-12);
    }
}

TEST(Metrics, RmseEqualsMaeForUniformErrors) {
    const Metrics m = compute_metrics({2, 0}, {1, 1});  // errors +1, -1
    EXPECT_NEAR(m.rmse, m.mae, 1e-15);
}

TEST(Buckets, BoundariesAreInclusive) {
    EXPECT_EQ(bucket_label_for(5), "5-20");
    EXPECT_EQ(bucket_label_for(20), "5-20");
    EXPECT_EQ(bucket_label_for(21), "21-40");
    EXPECT_EQ(bucket_label_for(40), "21-40");
    EXPECT_EQ(bucket_label_for(41), "41-64");
    EXPECT_EQ(bucket_label_for(64), "41-64");
    EXPECT_EQ(bucket_label_for(3), "5-20");
    EXPECT_EQ(bucket_label_for(100), "41-64");
}

TEST(EvalReport, SingleBucketOmitsOthers) {
    const EvalReport r = make_eval_report({1, 2}, {1, 2}, {6, 7});
    EXPECT_EQ(r.per_bucket.size(), 1u);
    EXPECT_TRUE(r.per_bucket.count("5-20"));
}

TEST(EvalReport, PerfectOracleScoresZeroEverywhere) {
    const EvalReport r = make_eval_report({2, 4, 9}, {2, 4, 9}, {8, 30, 60});
    EXPECT_EQ(r.per_bucket.size(), 3u);
    for (const auto& [label, m] : r.per_bucket) EXPECT_EQ(m.mae, 0.0) << label;
}

// Global MAE is the count-weighted mean of bucket MAEs; global RMSE^2 the
// count-weighted mean of bucket RMSE^2.
TEST(EvalReport, BucketsRecombineToOverall) {
    Xoshiro256 rng(12);
    std::vector<double> preds, targets;
    std::vector<int> sizes;
    for (int i = 0; i < 60; ++i) {
        preds.push_back(10 * rng.next_double());
        targets.push_back(10 * rng.next_double());
        sizes.push_back(rng.next_int(5, 64));
    }
    const EvalReport r = make_eval_report(preds, targets, sizes);
    double weighted_mae = 0.0, weighted_mse = 0.0;
    std::size_t total = 0;
    for (const auto& [label, m] : r.per_bucket) {
        weighted_mae += m.mae * static_cast<double>(m.count);
        weighted_mse += m.rmse * m.rmse * static_cast<double>(m.count);
        total += m.count;
    }
    ASSERT_EQ(total, r.n_eval);
    EXPECT_NEAR(weighted_mae / static_cast<double>(total), r.overall.mae, 1e-12);
    EXPECT_NEAR(std::sqrt(weighted_mse / static_cast<double>(total)), r.overall.rmse, 1e-12);
}

TEST(EvalReport, JsonCarriesBucketsAndNullForUndefinedR2) {
    const EvalReport r = make_eval_report({1.0, 1.5}, {2, 2}, {10, 50});
    const auto j = eval_report_to_json(r);
    EXPECT_EQ(j.at("n_eval"), 2);
    EXPECT_TRUE(j.at("buckets").contains("5-20"));
    EXPECT_TRUE(j.at("overall").at("r2").is_null());
}

TEST(EvalReport, TableRendersAllScopes) {
    const EvalReport r = make_eval_report({1, 2, 3}, {1, 2, 4}, {10, 30, 50});
    const std::string table = eval_report_table(r, "test accuracy");
    EXPECT_NE(table.find("all"), std::string::npos);
    EXPECT_NE(table.find("5-20"), std::string::npos);
    EXPECT_NE(table.find("21-40"), std::string::npos);
    EXPECT_NE(table.find("41-64"), std::string::npos);
}
