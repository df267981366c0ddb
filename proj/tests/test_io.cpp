#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "protectosim/figures.hpp"
#include "protectosim/io/config.hpp"
#include "protectosim/io/csv.hpp"
#include "protectosim/io/curves.hpp"
#include "protectosim/io/svg.hpp"
#include "protectosim/rng.hpp"

using namespace protectosim;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("protectosim_io_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("number formatting round-trips exactly") {
    RngStream rng(2718);
    for (int i = 0; i < 10000; ++i) {
        // spread magnitudes over a wide range, both signs
        const double mag = std::pow(10.0, -30.0 + 60.0 * rng.next_double());
        const double v = (rng.next_double() < 0.5 ? -1.0 : 1.0) * mag * rng.next_double();
        const std::string s = io::format_double(v);
        REQUIRE(io::parse_double_strict(s, "roundtrip") == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::parse_double_strict("inf", "t") ==
          std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(io::parse_double_strict("12abc", "t"), Error);
}

TEST_CASE("csv write/read round trip") {
    const auto dir = temp_dir("csv");
    RngStream rng(31);
    for (int table_idx = 0; table_idx < 20; ++table_idx) {
        const std::size_t cols = 1 + std::size_t(rng.next_double() * 4);
        const std::size_t rows = 1 + std::size_t(rng.next_double() * 30);
        std::vector<std::string> header;
        for (std::size_t c = 0; c < cols; ++c)
            header.push_back("col" + std::to_string(c));
        std::vector<std::vector<double>> data;
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<double> row;
            for (std::size_t c = 0; c < cols; ++c)
                row.push_back((rng.next_double() - 0.5) *
                              std::pow(10.0, -8 + 16 * rng.next_double()));
            data.push_back(row);
        }
        const fs::path path = dir / ("t" + std::to_string(table_idx) + ".csv");
        io::write_csv(path, header, data);
        const auto back = io::read_csv(path);
        REQUIRE(back.header == header);
        REQUIRE(back.rows == data); // bitwise identical values
    }
}

TEST_CASE("csv reader rejects malformed input") {
    const auto dir = temp_dir("csvbad");
    {
        std::ofstream out(dir / "ragged.csv");
        out << "a,b\n1,2\n3\n";
    }
    CHECK_THROWS_WITH(io::read_csv(dir / "ragged.csv"),
                      Catch::Matchers::ContainsSubstring("columns"));
    {
        std::ofstream out(dir / "text.csv");
        out << "a,b\n1,two\n";
    }
    CHECK_THROWS_AS(io::read_csv(dir / "text.csv"), Error);
    CHECK_THROWS_AS(io::read_csv(dir / "missing.csv"), Error);
}

TEST_CASE("atomic writes leave no temporary behind") {
    const auto dir = temp_dir("atomic");
    const fs::path target = dir / "out.txt";
    io::atomic_write_text(target, "first");
    CHECK(slurp(target) == "first");
    io::atomic_write_text(target, "second");
    CHECK(slurp(target) == "second");
    CHECK_FALSE(fs::exists(dir / "out.txt.tmp"));
}

TEST_CASE("key=value parser") {
    const char* text =
        "# comment line\n"
        "\n"
        "alpha = 1.5\n"
        "name=potassium\n"
        "  beta =  -3e-2  \n";
    const auto cfg = io::KeyValueConfig::parse_string(text, "test.cfg");
    CHECK(cfg.has("alpha"));
    CHECK(cfg.get_double("alpha") == 1.5);
    CHECK(cfg.get_double("beta") == -3e-2);
    CHECK(cfg.get_string("name") == "potassium");
    CHECK(cfg.get_double_or("gamma", 7.0) == 7.0);
    CHECK(cfg.get_u64_or("runs", 11) == 11);

    SECTION("missing key is named") {
        CHECK_THROWS_WITH(cfg.get_double("missing_key"),
                          Catch::Matchers::ContainsSubstring("missing_key"));
    }

    SECTION("unknown keys rejected with name and line") {
        CHECK_THROWS_WITH(cfg.require_known({"alpha", "beta"}),
                          Catch::Matchers::ContainsSubstring("name") &&
                              Catch::Matchers::ContainsSubstring("4"));
    }

    SECTION("duplicates rejected") {
        CHECK_THROWS_WITH(io::KeyValueConfig::parse_string("a=1\na=2\n"),
                          Catch::Matchers::ContainsSubstring("duplicate"));
    }

    SECTION("malformed lines and values rejected") {
        CHECK_THROWS_AS(io::KeyValueConfig::parse_string("just words\n"), ConfigError);
        const auto bad = io::KeyValueConfig::parse_string("x = 1.2.3\n");
        CHECK_THROWS_AS(bad.get_double("x"), ConfigError);
    }
}

TEST_CASE("curve sets validate their grid") {
    io::CurveSet c;
    c.x_label = "x";
    c.x = {0.0, 1.0, 2.0};
    c.series.push_back({"y", {1.0, 2.0, 3.0}});
    CHECK_NOTHROW(c.validate());

    auto bad = c;
    bad.x = {0.0, 1.0, 1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = c;
    bad.series[0].y[1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = c;
    bad.series[0].y.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("curves csv emission") {
    const auto dir = temp_dir("curves");
    io::CurveSet c;
    c.x_label = "s_d";
    c.x = {0.0, 0.5, 1.0};
    c.series.push_back({"P1", {0.1, 0.2, 0.3}});
    c.series.push_back({"bound", {0.4, 0.5, 0.6}});
    io::write_curves_csv(dir / "c.csv", c);
    const auto back = io::read_csv(dir / "c.csv");
    REQUIRE(back.header == std::vector<std::string>{"s_d", "P1", "bound"});
    REQUIRE(back.rows.size() == 3);
    CHECK(back.rows[1] == std::vector<double>{0.5, 0.2, 0.5});
}

TEST_CASE("svg output is structurally sound") {
    const auto dir = temp_dir("svg");
    io::CurveSet c;
    c.title = "a <plot> & more";
    c.x_label = "x";
    c.y_label = "y";
    c.x = {0.0, 1.0, 2.0, 3.0};
    c.series.push_back({"first", {0.0, 1.0, 0.5, 0.2}});
    c.series.push_back({"second<", {1.0, 0.0, 0.7, 0.9}});
    io::write_curves_svg(dir / "c.svg", c);
    const std::string svg = slurp(dir / "c.svg");
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t polylines = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        ++polylines;
        pos += 9;
    }
    CHECK(polylines == 2);
    CHECK(svg.find("second&lt;") != std::string::npos);
    CHECK(svg.find("a &lt;plot&gt; &amp; more") != std::string::npos);
}

TEST_CASE("figure builders") {
    SECTION("fig1 hits the quoted disturbance at unit strength") {
        const auto figs = figures::build("fig1");
        REQUIRE(figs.size() == 2);
        CHECK(figs[0].name == "fig1");
        CHECK(figs[1].name == "fig1_inset");
        const auto& c = figs[0].curves;
        c.validate();
        REQUIRE(c.x.size() == 400);
        std::size_t nearest = 0;
        for (std::size_t i = 0; i < c.x.size(); ++i)
            if (std::abs(c.x[i] - 1.0) < std::abs(c.x[nearest] - 1.0))
                nearest = i;
        CHECK(c.series[0].y[nearest] == Catch::Approx(0.17).margin(0.01));
        CHECK(figs[1].curves.x.back() == Catch::Approx(0.35).margin(1e-12));
    }

    SECTION("fig2 shows two unit-area packets separated by the shift") {
        const auto figs = figures::build("fig2");
        REQUIRE(figs.size() == 1);
        const auto& c = figs[0].curves;
        REQUIRE(c.series.size() == 2);
        const double h = c.x[1] - c.x[0];
        for (const auto& s : c.series) {
            double area = 0.0;
            for (std::size_t i = 1; i < c.x.size(); ++i)
                area += 0.5 * (s.y[i] + s.y[i - 1]) * h;
            REQUIRE(area == Catch::Approx(1.0).margin(1e-4));
        }
        const auto peak = [&](const io::CurveSet::Series& s) {
            std::size_t best = 0;
            for (std::size_t i = 0; i < s.y.size(); ++i)
                if (s.y[i] > s.y[best])
                    best = i;
            return c.x[best];
        };
        CHECK(peak(c.series[1]) - peak(c.series[0]) == Catch::Approx(0.1).margin(2 * h));
    }

    SECTION("fig3 broadens around the expectation-value shift") {
        const auto figs = figures::build("fig3");
        const auto& c = figs[0].curves;
        REQUIRE(c.series.size() == 4); // initial + three widths
        CHECK(c.series[0].label == "initial");
        CHECK(c.series[3].label == "sd=0.2");
        std::size_t best = 0;
        for (std::size_t i = 0; i < c.series[3].y.size(); ++i)
            if (c.series[3].y[i] > c.series[3].y[best])
                best = i;
        CHECK(c.x[best] == Catch::Approx(std::cos(pi / 4)).margin(2 * (c.x[1] - c.x[0])));
    }

    SECTION("fig4 is bimodal at strong coupling") {
        const auto figs = figures::build("fig4", {{"sd", "2"}});
        const auto& c = figs[0].curves;
        REQUIRE(c.series.size() == 1);
        int modes = 0;
        for (std::size_t i = 1; i + 1 < c.series[0].y.size(); ++i)
            if (c.series[0].y[i] > c.series[0].y[i - 1] &&
                c.series[0].y[i] > c.series[0].y[i + 1])
                ++modes;
        CHECK(modes == 2);
    }

    SECTION("overrides are validated") {
        CHECK_NOTHROW(figures::build("fig1", {{"xi", "0.2"}, {"points", "16"}}));
        CHECK_THROWS_AS(figures::build("fig1", {{"bogus", "1"}}), InvalidOverride);
        CHECK_THROWS_WITH(figures::build("fig1", {{"bogus", "1"}}),
                          Catch::Matchers::ContainsSubstring("bogus"));
        CHECK_THROWS_AS(figures::build("fig1", {{"xi", "abc"}}), InvalidOverride);
        CHECK_THROWS_AS(figures::build("fig1", {{"points", "1"}}), InvalidOverride);
        CHECK_THROWS_AS(figures::build("fig9"), UnknownFigure);
    }

    SECTION("figure bytes are deterministic") {
        const auto dir = temp_dir("goldens");
        const auto once = figures::build("fig3");
        const auto twice = figures::build("fig3");
        io::write_curves_csv(dir / "a.csv", once[0].curves);
        io::write_curves_csv(dir / "b.csv", twice[0].curves);
        CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
        io::write_curves_svg(dir / "a.svg", once[0].curves);
        io::write_curves_svg(dir / "b.svg", twice[0].curves);
        CHECK(slurp(dir / "a.svg") == slurp(dir / "b.svg"));
    }
}
