// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include <beamsquint/io.hpp>
#include <beamsquint/experiments.hpp>

#include <gtest/gtest.h>

#include <charconv>
#include <limits>
#include <random>
#include <sstream>

namespace bs = beamsquint;

TEST(FormatNumber, ShortestRoundTrip)
{
    EXPECT_EQ(bs::format_number(0.5), "0.5");
    EXPECT_EQ(bs::format_number(2048), "2048");
    EXPECT_EQ(bs::format_number(1e-7), "1e-07");
    EXPECT_EQ(bs::format_number(-0.0), "-0");
    EXPECT_EQ(bs::format_number(std::numeric_limits<double>::infinity()), "inf");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i)
    {
        const double v = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        const std::string s = bs::format_number(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        EXPECT_EQ(back, v) << s;
    }
}

TEST(Csv, HeaderRowsAndMissingCells)
{
    bs::SweepResult r{"demo", {{"N", "-"}, {"C", "bit/s"}}, {}, {}};
    r.add_row({8.0, 1.25});
    r.add_row({16.0, std::nullopt});
    EXPECT_EQ(bs::to_csv(r), "N[-],C[bit/s]\n8,1.25\n16,infeasible\n");
    EXPECT_THROW(r.add_row({1.0}), bs::Error);
}

TEST(Csv, LinesMatchColumnCount)
{
    const auto r = bs::sweep_gain_pattern({8, -0.25, 0.25, 21});
    std::istringstream in(bs::to_csv(r));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line))
    {
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 1);
        EXPECT_EQ(line.find('\r'), std::string::npos);
        ++lines;
    }
    EXPECT_EQ(lines, 22u);
}

TEST(SweepJson, RoundTripIsByteIdentical)
{
    bs::CodebookSizeParams p;
    p.b_values = {0.0714};
    p.n_min = 36;
    p.n_max = 48;
    p.n_step = 4;
    const auto r = bs::sweep_codebook_size_vs_n(p);
    const std::string text = bs::dump(bs::to_json(r));
    const auto back = bs::sweep_from_json(nlohmann::ordered_json::parse(text));
    EXPECT_EQ(bs::dump(bs::to_json(back)), text);
    EXPECT_EQ(back.rows, r.rows);
    EXPECT_EQ(bs::to_csv(back), bs::to_csv(r));
    EXPECT_NE(text.find("null"), std::string::npos);
    EXPECT_EQ(text.back(), '\n');
}

TEST(SweepJson, RowsSurviveExactly)
{
    bs::VerifyParams p;
    p.samples = 50;
    const auto r = bs::verify_facts(p);
    const auto back = bs::sweep_from_json(nlohmann::ordered_json::parse(bs::dump(bs::to_json(r))));
    EXPECT_EQ(back.rows, r.rows);
    EXPECT_EQ(back.params, r.params);
}

TEST(CodebookJson, RoundTripIsByteIdentical)
{
    const bs::ArrayConfig arr(16);
    const auto band = bs::BandConfig::fractional(0.0342, 2048, 1.0);
    const auto cb = bs::design_codebook_for_ratio(1.0, bs::kHalfPowerRatio, band, arr);
    const std::string text = bs::dump(bs::to_json(cb));
    const auto back = bs::codebook_from_json(nlohmann::ordered_json::parse(text));
    EXPECT_EQ(bs::dump(bs::to_json(back)), text);
    ASSERT_EQ(back.size(), cb.size());
    EXPECT_EQ(back.parity, cb.parity);
    EXPECT_EQ(back.r, cb.r);
    EXPECT_DOUBLE_EQ(back.c_t, cb.c_t);
    for (std::size_t i = 0; i < cb.size(); ++i)
    {
        EXPECT_EQ(back.beams[i].focus, cb.beams[i].focus);
        EXPECT_EQ(back.beams[i].phases.phases, cb.beams[i].phases.phases);
    }
    EXPECT_TRUE(bs::coverage_check(back, band, arr, 1e-3));
}

TEST(CodebookJson, ThresholdFormKeepsCapacity)
{
    const bs::ArrayConfig arr(8);
    const auto band = bs::BandConfig::fractional(0.02, 64, 2.0);
    const auto cb = bs::design_codebook(1.0, 3.0, band, arr);
    const auto j = bs::to_json(cb);
    EXPECT_FALSE(j.contains("r"));
    EXPECT_EQ(j.at("c_t").get<double>(), 3.0);
    const auto back = bs::codebook_from_json(j);
    EXPECT_EQ(back.c_t, 3.0);
    EXPECT_FALSE(back.r);
    EXPECT_NE(bs::dump(j).find("\"phases\""), std::string::npos);
    EXPECT_EQ(bs::dump(j).find("-0.0"), std::string::npos);
}
