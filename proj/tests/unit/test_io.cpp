#include <gtest/gtest.h>

#include <sstream>

#include "shadowtail/csv.hpp"
#include "shadowtail/error.hpp"
#include "shadowtail/io.hpp"

using namespace shadowtail;

TEST(Csv, SplitQuoteTrim) {
    EXPECT_EQ(csv::split_line("a,\"b,c\",\"d\"\"e\",\r"), (std::vector<std::string>{"a", "b,c", "d\"e", ""}));
    EXPECT_EQ(csv::quote("plain"), "plain");
    EXPECT_EQ(csv::quote("a,b"), "\"a,b\"");
    EXPECT_EQ(csv::quote("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv::trim("  x y \t"), "x y");
}

TEST(Csv, Numbers) {
    EXPECT_EQ(csv::parse_double("1.5"), 1.5);
    EXPECT_FALSE(csv::parse_double("1.5x").has_value());
    EXPECT_FALSE(csv::parse_double("").has_value());
    EXPECT_FALSE(csv::parse_double("nan").has_value());
    EXPECT_EQ(csv::format12(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(csv::format12(2.0), "2");
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789})
        EXPECT_EQ(*csv::parse_double(csv::format_exact(v)), v);
}

TEST(Io, SizesRoundTripAt12Digits) {
    const std::vector<double> s{1234.5, 10.0 / 3.0, 1.0};
    std::stringstream buf;
    io::write_sizes_csv(buf, s);
    EXPECT_EQ(buf.str(), "rank,size\n1,1234.5\n2,3.33333333333\n3,1\n");
    const auto back = io::read_sizes_csv(buf);
    ASSERT_EQ(back.size(), 3u);
    EXPECT_NEAR(back[1], 10.0 / 3.0, 1e-11);
    std::istringstream bad("rank,size\n1,1\n2,5\n");
    EXPECT_THROW(io::read_sizes_csv(bad), Error);
    std::istringstream hdr("k,s\n1,1\n");
    EXPECT_THROW(io::read_sizes_csv(hdr), Error);
}

TEST(Io, SimDocumentDefaultsAndRoundTrip) {
    const auto j = io::json::parse(R"({"params":{"mu":0.09,"sigma":0.17,"h":0.08,"lambda":12},
                                      "sim":{"n_firms_init":5000,"seed":7}})");
    const auto d = io::sim_document_from_json(j);
    EXPECT_DOUBLE_EQ(d.params.nu, 0.08 * 5000);
    EXPECT_EQ(d.params.epsilon, 0.1);
    EXPECT_EQ(d.params.drift, DriftConvention::geometric);
    EXPECT_EQ(d.sim.seed, 7u);
    EXPECT_EQ(d.sim.keep_top, 2000u);
    const auto again = io::sim_document_from_json(io::to_json(d));
    EXPECT_EQ(io::to_json(again), io::to_json(d));
    EXPECT_THROW(io::sim_document_from_json(io::json::parse(R"({"params":{"mu":0}})")), Error);
}

TEST(Io, JsonKeepsFullPrecision) {
    ParetoFit f;
    f.gamma_hat = 0.1 + 0.2;
    const auto j = io::json::parse(io::to_json(f).dump());
    EXPECT_EQ(j["gamma_hat"].get<double>(), 0.1 + 0.2);
}

TEST(Io, ComparisonSeries) {
    std::istringstream in("year,value_trillions\n2007,62\n2011,67\n");
    const auto m = io::read_comparison_series(in);
    EXPECT_EQ(m.at(2007), 62.0);
    EXPECT_EQ(m.at(2011), 67.0);
    std::istringstream bad("year,value_trillions\nx,1\n");
    EXPECT_THROW(io::read_comparison_series(bad), Error);
}

TEST(Io, TableHeaders) {
    std::stringstream a, b, c, d;
    io::write_ccdf_csv(a, std::vector<CcdfPoint>{{2.0, 0.5, 1}});
    EXPECT_EQ(a.str(), "size,ccdf,rank\n2,0.5,1\n");
    io::write_rank_gaps_csv(b, std::vector<RankGap>{{1, 2.0, 3.0}});
    EXPECT_EQ(b.str(), "rank,observed,theoretical,gap\n1,2,3,1\n");
    io::write_objective_csv(c, std::vector<CurvePoint>{{12.0, 0.25}});
    EXPECT_EQ(c.str(), "lambda,mse\n12,0.25\n");
    RegressionCurve rc{{1.0}, {0.5}, {0.25}, {0.75}, 1.0};
    io::write_curve_csv(d, rc);
    EXPECT_EQ(d.str(), "x,estimate,low,high\n1,0.5,0.25,0.75\n");
}
