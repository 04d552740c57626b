#include <gtest/gtest.h>

#include <sstream>

#include "pic/bench.hpp"
#include "support.hpp"

using namespace pic;
using namespace pic::bench;

TEST(BenchCsv, EmptyMethodListGivesHeaderOnly) {
    const auto rows = run_mask_comparison("img", testing_support::natural64(), {0.1}, {});
    std::ostringstream out;
    write_csv(rows, out);
    EXPECT_EQ(out.str(), std::string(csv_header) + "\r\n");
}

TEST(BenchCsv, QuotesFieldsPerRfc4180) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Bench, DeterministicAndOrderedAcrossThreadCounts) {
    const auto f = testing_support::natural64();
    BenchOptions one;
    one.seed = 3;
    BenchOptions many = one;
    many.threads = 3;
    const auto methods = mask_comparison_methods(0.1, 3.0, 3);
    const auto a = run_mask_comparison("crop", f, {0.0, 0.1}, methods, one);
    const auto b = run_mask_comparison("crop", f, {0.0, 0.1}, methods, many);
    std::ostringstream sa, sb;
    write_csv(a, sa);
    write_csv(b, sb);
    EXPECT_EQ(sa.str(), sb.str());
    ASSERT_EQ(a.size(), 10u);
    EXPECT_EQ(a[0].method, "Optimized");
    EXPECT_EQ(a[0].sigma, 0.0);
    EXPECT_EQ(a[1].sigma, 0.1);
    EXPECT_EQ(a[9].method, "Random");
}

TEST(Bench, MaskCountsHonourBudgets) {
    const auto f = testing_support::natural64();
    const auto rows = run_mask_comparison("crop", f, {0.1}, mask_comparison_methods(0.1, 3.0));
    for (const auto& r : rows) {
        EXPECT_LE(r.mask_count, f.size());
        if (r.method == "Optimized" || r.method == "H1" || r.method == "Random") {
            EXPECT_EQ(r.mask_count, 410u);
        } else {
            EXPECT_NEAR(double(r.mask_count), 409.6, 0.02 * 409.6);
        }
        EXPECT_GE(r.l2_error, 0.0);
    }
}

TEST(Bench, HalftonedOptimizedBeatsHalftonedH1UnderNoise) {
    const auto f = testing_support::natural64();
    BenchOptions o;
    o.seed = 1;
    const auto rows = run_mask_comparison("crop", f, {0.1}, mask_comparison_methods(0.1, 3.0), o);
    double opt = 0, h1 = 0;
    for (const auto& r : rows) {
        if (r.method == "Halftoned-Optimized") opt = r.l2_error;
        if (r.method == "Halftoned-H1") h1 = r.l2_error;
    }
    EXPECT_LT(opt, h1);
}

TEST(Bench, IncreasingMasksBeatStaticMaskOnCrop) {
    const auto f = testing_support::natural64();
    const auto all = method_comparison_methods(0.1);
    const auto rows = run_method_comparison("crop", f, {0.0}, {find_method(all, "L2Sta"), find_method(all, "L2Inc")});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_LT(rows[1].l2_error, rows[0].l2_error);
    EXPECT_EQ(rows[1].N, 40u);
}

TEST(Bench, ZeroImpulseFractionEqualsCleanRun) {
    const auto f = testing_support::natural64();
    const auto all = method_comparison_methods(0.1);
    const std::vector<MethodSpec> m{find_method(all, "L2Insta")};
    const auto sp = run_saltpepper("crop", f, 0.0, m);
    const auto clean = run_method_comparison("crop", f, {0.0}, m);
    ASSERT_EQ(sp.size(), 2u);
    EXPECT_EQ(sp[0].l2_error, clean[0].l2_error);
    EXPECT_EQ(sp[1].l2_error, clean[0].l2_error);
    EXPECT_EQ(sp[0].noise, "none");
}

TEST(Bench, ImpulseNoiseRowsAreLabelled) {
    const auto f = testing_support::natural64();
    const auto all = method_comparison_methods(0.1);
    const auto sp = run_saltpepper("crop", f, 0.01, {find_method(all, "L2")});
    ASSERT_EQ(sp.size(), 2u);
    EXPECT_EQ(sp[0].noise, "salt");
    EXPECT_EQ(sp[1].noise, "pepper");
    EXPECT_EQ(sp[0].sigma, 0.01);
}

TEST(Bench, UnknownMethodName) {
    EXPECT_THROW(find_method(method_comparison_methods(), "B-Tree"), std::invalid_argument);
}
