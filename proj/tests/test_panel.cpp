#include "tssim/csv.hpp"
#include "tssim/panel.hpp"
#include "tssim/taxonomy.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

using namespace tssim;

namespace {

std::string fixture(const char* name) {
    std::ifstream in(std::string(TSSIM_DATA_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kHeader = "country,indicator,topic,year,value\n";

} // namespace

TEST(Csv, QuotedFieldsAndCrlf) {
    const auto rows = csv::parse_rows("a,\"b,c\",\"say \"\"hi\"\"\"\r\n1,,3\r\n");
    ASSERT_EQ(rows.size(), 2U);
    EXPECT_EQ(rows[0][1], "b,c");
    EXPECT_EQ(rows[0][2], "say \"hi\"");
    EXPECT_EQ(rows[1][1], "");
    EXPECT_THROW(csv::parse_rows("a,\"open\n"), ParseError);
    EXPECT_THROW(csv::parse("x,y\n1\n"), ParseError);
}

TEST(Csv, FormatDoubleRoundTrips) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1e6, 1e6);
    for (int k = 0; k < 1000; ++k) {
        const double x = d(rng);
        double back = 0;
        ASSERT_TRUE(csv::parse_double(csv::format_double(x), back));
        EXPECT_EQ(back, x);
    }
}

TEST(Taxonomy, DefaultHasThirteenGroups) {
    const auto tax = TopicTaxonomy::world_bank_default();
    std::set<int> groups;
    for (const auto& [topic, group] : tax.topic_groups()) {
        groups.insert(group);
    }
    EXPECT_EQ(groups.size(), 13U);
    EXPECT_EQ(*groups.begin(), 1);
    EXPECT_EQ(*groups.rbegin(), 13);
    EXPECT_EQ(tax.group_of_topic("Health: Mortality"), 7);
    EXPECT_EQ(tax.group_of_topic("Trade"), 13);
    EXPECT_EQ(tax.group_of_topic("Private Sector & Trade: Exports"), 10);
    EXPECT_EQ(tax.group_of_topic("Economic Policy & Debt: National accounts: US$ at current prices: Value added"), 1);
    // Unlisted subtopic resolves through its heading.
    EXPECT_EQ(tax.group_of_topic("Poverty: Something new"), 9);
    EXPECT_FALSE(tax.group_of_topic("Astrology"));
}

TEST(ParsePanel, MinimalTwoRows) {
    const auto p = parse_panel(std::string(kHeader) + "IRN,X,Trade,2000,1.0\nIRN,X,Trade,2001,\n");
    EXPECT_EQ(p.cell_count(), 2U);
    EXPECT_EQ(p.observed_count(), 1U);
    EXPECT_EQ(p.at(0, 0, 0), 1.0);
    EXPECT_FALSE(p.at(0, 0, 1));
}

TEST(ParsePanel, IdenticalDuplicateIsIdempotent) {
    const auto once = parse_panel(std::string(kHeader) + "IRN,X,Trade,2000,1.5\n");
    const auto twice = parse_panel(std::string(kHeader) + "IRN,X,Trade,2000,1.5\nIRN,X,Trade,2000,1.5\n");
    EXPECT_EQ(once, twice);
    EXPECT_EQ(twice.cell_count(), 1U);
}

TEST(ParsePanel, ConflictingDuplicateNamesKey) {
    try {
        parse_panel(std::string(kHeader) + "IRN,X,Trade,2000,1.5\nIRN,X,Trade,2000,2.5\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("(IRN, X, 2000)"), std::string::npos) << e.what();
    }
}

TEST(ParsePanel, BadFieldsReportLineNumbers) {
    try {
        parse_panel(std::string(kHeader) + "IRN,X,Trade,2000,1\nIRN,X,Trade,20x1,2\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    try {
        parse_panel(std::string(kHeader) + "IRN,X,Trade,2000,abc\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
    // Sentinels are plain numbers, not missing markers.
    const auto p = parse_panel(std::string(kHeader) + "IRN,X,Trade,2000,-999\n");
    EXPECT_EQ(p.at(0, 0, 0), -999.0);
}

TEST(ParsePanel, StrictTaxonomyRejectsUnknownTopic) {
    PanelSchema strict;
    strict.strict_taxonomy = true;
    const std::string text = std::string(kHeader) + "IRN,X,Astrology,2000,1\n";
    EXPECT_THROW(parse_panel(text, strict), ParseError);
    EXPECT_NO_THROW(parse_panel(text));
}

TEST(ParsePanel, CustomColumnNamesAndYearBounds) {
    PanelSchema schema;
    schema.country_column = "iso3";
    schema.value_column = "obs";
    schema.year_min = 2001;
    schema.year_max = 2002;
    const auto p = parse_panel("obs,iso3,indicator,topic,year\n1,IRN,X,Trade,2000\n2,IRN,X,Trade,2001\n"
                               "3,IRN,X,Trade,2002\n4,IRN,X,Trade,2003\n",
                               schema);
    EXPECT_EQ(p.years(), (std::vector<int>{2001, 2002}));
    EXPECT_EQ(p.at(0, 0, 0), 2.0);
    EXPECT_THROW(parse_panel("a,b\n1,2\n", schema), ParseError);
}

TEST(ParsePanel, SmallFixtureAxes) {
    const auto p = parse_panel(fixture("fixture_small.csv"));
    // Frozen from tools/make_fixtures.py: 12 x 3 x 24 = 864 cells, 821 observed.
    EXPECT_EQ(p.cell_count(), 864U);
    EXPECT_EQ(p.observed_count(), 821U);
    EXPECT_EQ(p.indicators(), (std::vector<std::string>{"GB.XPD.RSDV.GD.ZS", "SH.DYN.MORT", "SI.POV.DDAY"}));
    EXPECT_EQ(p.countries(), (std::vector<std::string>{"ARE", "ARM", "AZE", "IRN", "IRQ", "KWT", "OMN", "PAK", "QAT",
                                                       "SAU", "TKM", "TUR"}));
    EXPECT_EQ(p.years().front(), 2000);
    EXPECT_EQ(p.years().back(), 2023);
}

TEST(ParsePanel, ShuffledRowsGiveIdenticalPanel) {
    const auto text = fixture("fixture_small.csv");
    auto rows = csv::parse(text);
    std::mt19937_64 rng(8);
    std::shuffle(rows.rows.begin(), rows.rows.end(), rng);
    std::string shuffled;
    csv::append_row(shuffled, rows.header);
    for (const auto& r : rows.rows) {
        csv::append_row(shuffled, r);
    }
    EXPECT_EQ(parse_panel(text), parse_panel(shuffled));
    EXPECT_EQ(serialize_panel(parse_panel(text)), serialize_panel(parse_panel(shuffled)));
}

TEST(ParsePanel, CanonicalRoundTrip) {
    const auto p = parse_panel(fixture("fixture_panel.csv"));
    const auto text = serialize_panel(p);
    const auto again = parse_panel(text);
    EXPECT_EQ(p, again);
    EXPECT_EQ(text, serialize_panel(again));
    EXPECT_EQ(text.substr(0, text.find('\n')), "country,indicator,topic,year,value");
}

TEST(Coverage, CountsAndExclusion) {
    std::string text = kHeader;
    for (int y = 2000; y <= 2023; ++y) {
        text += "IRN,X,Trade," + std::to_string(y) + ",1\n";
        text += "BHR,X,Trade," + std::to_string(y) + "," + (y == 2010 ? "4" : "") + "\n";
    }
    const auto report = coverage_report(parse_panel(text), 3);
    ASSERT_EQ(report.size(), 2U);
    EXPECT_EQ(report[0].country, "BHR");
    EXPECT_EQ(report[0].observed_years, 1U);
    EXPECT_TRUE(report[0].excluded);
    EXPECT_EQ(report[1].observed_years, 24U);
    EXPECT_FALSE(report[1].excluded);
}

TEST(Coverage, FixtureCountsMatchIndependentTally) {
    const auto text = fixture("fixture_panel.csv");
    // Independent tally straight from the text lines (the fixture has no quotes).
    std::map<std::pair<std::string, std::string>, std::size_t> tally;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::size_t total = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string part;
        while (std::getline(ls, part, ',')) {
            f.push_back(part);
        }
        const bool has_value = f.size() == 5 && !f[4].empty();
        tally[{f[0], f[1]}] += has_value ? 1 : 0;
        total += has_value ? 1 : 0;
    }
    EXPECT_EQ(total, 12960U); // frozen from tools/make_fixtures.py
    const auto panel = parse_panel(text);
    const auto report = coverage_report(panel);
    std::size_t sum = 0;
    for (const auto& e : report) {
        EXPECT_EQ(e.observed_years, (tally[{e.country, e.indicator}]));
        EXPECT_FALSE(e.excluded);
        sum += e.observed_years;
    }
    EXPECT_EQ(sum, panel.observed_count());
}

TEST(ExtractSeries, OrderAndMissingMarkers) {
    std::string text = kHeader;
    for (int y = 2003; y <= 2007; ++y) {
        text += "IRN,X,Trade," + std::to_string(y) + "," + (y == 2005 ? "" : std::to_string(y - 2000)) + "\n";
    }
    const auto s = extract_series(parse_panel(text), "IRN", "X");
    ASSERT_EQ(s.values.size(), 5U);
    EXPECT_EQ(s.years.front(), 2003);
    EXPECT_FALSE(s.values[2]);
    EXPECT_EQ(s.values[4], 7.0);
    EXPECT_FALSE(s.complete());
    EXPECT_THROW(s.to_time_series(), InvalidArgument);
    EXPECT_THROW(extract_series(parse_panel(text), "IRQ", "X"), LookupError);
    EXPECT_THROW(extract_series(parse_panel(text), "IRN", "Y"), LookupError);
}

TEST(ExtractSeries, FixtureMatchesSourceRows) {
    const auto text = fixture("fixture_small.csv");
    const auto panel = parse_panel(text);
    const auto table = csv::parse(text);
    for (const auto& row : table.rows) {
        const auto s = extract_series(panel, row[0], row[1]);
        const auto t = static_cast<std::size_t>(std::stoi(row[3]) - s.years.front());
        if (row[4].empty()) {
            EXPECT_FALSE(s.values[t]);
        } else {
            EXPECT_EQ(*s.values[t], std::stod(row[4]));
        }
    }
}
