#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mechcert/sweep.hpp"

using namespace mechcert;

namespace {

struct ReferenceRange {
    SweepParameter parameter;
    double c_min, c_max, b_min, b_max;
};

// Reference extremes of capacity at B = 0.22 and of the critical bias.
const ReferenceRange kReference[] = {
    {SweepParameter::Sigma, 0.73, 0.92, 0.64, 0.89},  {SweepParameter::KappaMu, 0.47, 1.22, 0.43, 2.14},
    {SweepParameter::DF, 0.72, 0.88, 0.70, 0.72},     {SweepParameter::K, 0.57, 0.99, 0.71, 0.72},
    {SweepParameter::POpt, 0.42, 0.92, 0.39, 0.89},   {SweepParameter::BMu, 0.42, 1.15, 0.71, 0.71},
};

}  // namespace

TEST(SweepParameter, ParsesNamesAndRejectsUnknown) {
    for (auto p : kAllSweepParameters) {
        EXPECT_EQ(parse_sweep_parameter(to_string(p)), p);
    }
    EXPECT_THROW((void)parse_sweep_parameter("gamma"), DomainError);
}

TEST(LinearGrid, EndpointsAndSpacing) {
    const auto g = linear_grid(0.1, 0.4, 4);
    ASSERT_EQ(g.size(), 4u);
    EXPECT_EQ(g.front(), 0.1);
    EXPECT_EQ(g.back(), 0.4);
    EXPECT_NEAR(g[1], 0.2, 1e-15);
    EXPECT_EQ(linear_grid(2.0, 5.0, 1), (std::vector<double>{2.0}));
    EXPECT_THROW((void)linear_grid(0, 1, 0), DomainError);
}

TEST(Sweep1d, KappaEndpoints) {
    const auto rows = sweep_1d({SweepParameter::KappaMu, {0.6, 3.0}, {}});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(rows[0].cell->capacity, 1.22, 0.01);
    EXPECT_NEAR(rows[1].cell->capacity, 0.47, 0.01);
    EXPECT_NEAR(*rows[0].cell->critical_bias, 2.14, 0.01);
    EXPECT_NEAR(*rows[1].cell->critical_bias, 0.43, 0.01);
}

TEST(Sweep1d, DimensionEndpoints) {
    const auto rows = sweep_1d({SweepParameter::DF, {2, 5}, {}});
    EXPECT_NEAR(rows[0].cell->capacity, 0.72, 0.01);
    EXPECT_NEAR(rows[1].cell->capacity, 0.88, 0.01);
}

TEST(Sweep1d, CriticalBiasIgnoresBias) {
    const auto rows = sweep_1d({SweepParameter::BMu, default_sweep_values(SweepParameter::BMu), {}});
    for (const auto& r : rows) {
        ASSERT_TRUE(r.cell.has_value());
        EXPECT_NEAR(*r.cell->critical_bias, 0.714, 1e-3);
        EXPECT_NEAR(*r.cell->critical_bias, *rows.front().cell->critical_bias, 1e-15);
    }
}

TEST(Sweep1d, InvalidValueIsMarkedAndSweepContinues) {
    const auto rows = sweep_1d({SweepParameter::Sigma, {0.4, -1.0, 0.45}, {}});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_TRUE(rows[0].cell.has_value());
    EXPECT_FALSE(rows[1].cell.has_value());
    EXPECT_FALSE(rows[1].error.empty());
    EXPECT_TRUE(rows[2].cell.has_value());
    std::ostringstream os;
    write_sweep1d_rows(os, rows);
    EXPECT_NE(os.str().find("sigma,-1,,,,invalid\n"), std::string::npos);
}

TEST(Sweep1d, NonIntegerArmCountIsInvalid) {
    const auto rows = sweep_1d({SweepParameter::K, {8.5}, {}});
    EXPECT_FALSE(rows[0].cell.has_value());
}

TEST(Sweep1d, AttainmentSetsNoise) {
    const auto spec = apply_sweep_value({}, SweepParameter::POpt, 0.8);
    EXPECT_NEAR(spec.sigma, 0.4, 1e-12);
}

TEST(SensitivityTable, ReproducesReferenceEndpoints) {
    const auto table = sensitivity_table({});
    ASSERT_EQ(table.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
        const auto s = summarize_sweep(table[i]);
        const auto& want = kReference[i];
        ASSERT_EQ(s.parameter, want.parameter);
        SCOPED_TRACE(to_string(s.parameter));
        EXPECT_NEAR(s.c_min, want.c_min, 0.01);
        EXPECT_NEAR(s.c_max, want.c_max, 0.01);
        EXPECT_NEAR(s.b_crit_min, want.b_min, 0.01);
        EXPECT_NEAR(s.b_crit_max, want.b_max, 0.01);
        EXPECT_TRUE(s.all_data_efficient);
    }
}

TEST(Sweep2d, WorkingPointCellAndZeroBias) {
    const auto rows = sweep_2d({SweepParameter::KappaMu, {0.6, 1.8, 3.0}}, {SweepParameter::BMu, {0.0, 0.22, 0.40}}, {});
    ASSERT_EQ(rows.size(), 9u);
    // x outer, y inner
    EXPECT_EQ(rows[4].x, 1.8);
    EXPECT_EQ(rows[4].y, 0.22);
    EXPECT_NEAR(*rows[4].ratio, 1.0 / 3.24, 0.01);
    for (std::size_t i = 0; i < rows.size(); i += 3) {
        EXPECT_EQ(*rows[i].ratio, 0.0);
    }
    EXPECT_NEAR(*rows[8].ratio, 0.93, 0.01);
    EXPECT_LT(*rows[8].ratio, 1.0);
}

TEST(Sweep2d, RejectsIdenticalAxes) {
    EXPECT_THROW((void)sweep_2d({SweepParameter::Sigma, {0.4}}, {SweepParameter::Sigma, {0.4}}, {}), DomainError);
}

TEST(KSweep, Examples) {
    const auto rows = k_sweep({}, {4, 8, 16}, 12);
    EXPECT_NEAR(rows[0].capacity_at_base_bias, 0.57, 0.01);
    EXPECT_NEAR(*rows[1].critical_bias, 0.714, 1e-3);
    EXPECT_NEAR(*rows[2].critical_bias, 0.706, 5e-3);
    EXPECT_THROW((void)k_sweep({}, {65}, 12), DomainError);
}

TEST(KSweep, UnreachableRowsAreMarked) {
    const auto rows = k_sweep({}, {8}, 1);
    EXPECT_FALSE(rows[0].critical_bias.has_value());
    std::ostringstream os;
    write_ksweep_csv(os, rows);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "k,critical_bias,capacity_at_base_bias");
    EXPECT_NE(os.str().find("8,unreachable,"), std::string::npos);
}

TEST(SweepCsv, HeadersAreExact) {
    std::ostringstream a, b;
    write_sweep1d_header(a);
    write_sweep2d_csv(b, SweepParameter::KappaMu, SweepParameter::BMu, {});
    EXPECT_EQ(a.str(), "param,value,capacity_nats,critical_bias,ratio,regime\n");
    EXPECT_EQ(b.str(), "x_param,y_param,x,y,ratio\n");
}
