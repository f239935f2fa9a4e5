#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "frame4/cli.hpp"
#include "support.hpp"

using namespace frame4;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("frame4_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

double field(const std::string& text, const std::string& key) {
    const auto pos = text.find("  " + key + ": ");
    if (pos == std::string::npos) return std::nan("");
    return std::stod(text.substr(pos + key.size() + 4));
}

}  // namespace

TEST(Io, FormatHelpers) {
    EXPECT_EQ(io::parse_format("csv"), io::Format::Csv);
    EXPECT_EQ(io::parse_format("json"), io::Format::Json);
    EXPECT_THROW(io::parse_format("xml"), Error);
    EXPECT_EQ(std::stod(io::fmt(0.1)), 0.1);
    EXPECT_EQ(std::stod(io::fmt(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Io, FrameRoundTripCsvAndJson) {
    TempDir dir;
    const auto f = rmf_bishop(sample_curve(get_preset("helix4d"), 64));
    for (auto fmt : {io::Format::Csv, io::Format::Json}) {
        const std::string p = dir / (std::string("frame") + io::extension(fmt));
        io::write_table(p, io::frame_table(f), fmt, {{"kind", "test"}});
        EXPECT_FALSE(fs::exists(p + ".tmp"));
        io::Metadata meta;
        const auto g = io::frame_from_table(io::read_table(p, &meta));
        ASSERT_EQ(g.size(), f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            EXPECT_EQ(g.s[i], f.s[i]);
            EXPECT_EQ(g.Z[i], f.Z[i]);
        }
        if (fmt == io::Format::Json) EXPECT_EQ(meta["kind"], "test");
    }
}

TEST(Io, CoefficientRoundTrip) {
    TempDir dir;
    std::vector<std::array<double, 3>> ch;
    for (int i = 0; i < 32; ++i) ch.push_back({0.1 * i, -1.0 / (i + 1), std::sin(i)});
    const auto c = coefficients_from_channels(frame4::testing::grid(0.0, 1.0, 32), ch, 10);
    for (auto fmt : {io::Format::Csv, io::Format::Json}) {
        const std::string p = dir / (std::string("c") + io::extension(fmt));
        io::write_table(p, io::coefficient_table(c), fmt);
        const auto d = io::coefficients_from_table(io::read_table(p));
        EXPECT_EQ(*d.pattern, 10);
        EXPECT_EQ(d.channels, c.channels);
        EXPECT_EQ(pattern_residual(d, 10), 0.0);
    }
}

TEST(Io, UndeclaredCoefficientsRejected) {
    CoefficientPath c;
    c.s = {0.0};
    c.X = {Skew4{}};
    EXPECT_THROW(io::coefficient_table(c), Error);
}

TEST(Io, BadCsvReportsIoError) {
    TempDir dir;
    const std::string p = dir / "bad.csv";
    io::atomic_write(p, "# comment\ns,x1\n0,abc\n");
    try {
        io::read_table(p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IoError);
    }
    EXPECT_THROW(io::read_table(dir / "missing.csv"), Error);
}

TEST(Io, SampledCurveInput) {
    TempDir dir;
    io::Table t;
    t.columns = {"t", "x", "y", "z", "w"};
    for (int i = 0; i <= 256; ++i) {
        const double a = 2 * std::numbers::pi * i / 256;
        t.rows.push_back({a, std::cos(a), std::sin(a), 0.0, 0.0});
    }
    const std::string p = dir / "circle.csv";
    io::write_table(p, t, io::Format::Csv);
    Interval domain;
    const auto raw = io::read_sampled_curve(p, &domain);
    EXPECT_NEAR(domain.hi, 2 * std::numbers::pi, 1e-15);
    const auto r = run({"frame", "--input", p, "--type", "B", "--grid-n", "256"});
    EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, HelixTypeDSucceeds) {
    const auto r = run({"frame", "--preset", "helix4d", "--type", "D", "--grid-n", "512"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("passed: true"), std::string::npos);
}

TEST(Cli, GammaNoDTypeDIsAdmissibilityFailure) {
    const auto r = run({"frame", "--preset", "gammaNoD", "--type", "D", "--grid-n", "512"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("Not2Regular"), std::string::npos);
    EXPECT_NE(r.out.find("obstruction"), std::string::npos);
}

TEST(Cli, GammaNoDTypeCViaHyperplane) {
    const auto r = run({"frame", "--preset", "gammaNoD", "--type", "C", "--grid-n", "512"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("hyperplane"), std::string::npos);
}

TEST(Cli, NoFTypeFFails) {
    const auto r = run({"frame", "--preset", "noF", "--type", "F", "--grid-n", "256"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("RankDeficient"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    auto r = run({"frame", "--preset", "nope", "--type", "B"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("UnknownPreset"), std::string::npos);
    EXPECT_EQ(run({"frame", "--type", "B"}).code, 1);
    EXPECT_EQ(run({"frame", "--preset", "line", "--type", "Q"}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"frame", "--preset", "line", "--type", "B", "--grid-n", "3"}).code, 1);
    EXPECT_EQ(run({"frame", "--preset", "helix4d", "--type", "C", "--sign1", "2", "--grid-n", "64"}).code, 1);
}

TEST(Cli, GenerateMatchesClosedForm) {
    TempDir dir;
    const auto r = run({"generate", "--constant", "2", "1", "0", "0", "1", "0", "--length", "4", "--grid-n", "1024",
                        "--output", dir / "g"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("pattern_id: 1"), std::string::npos);
    const auto t = io::read_table(dir / "g_curve.csv");
    const auto p = get_preset("expC");
    const Vec4 shift = p.closed_form(0.0);
    for (const auto& row : t.rows) {
        const Vec4 g(row[1], row[2], row[3], row[4]);
        EXPECT_LT((g + shift - p.closed_form(row[0])).cwiseAbs().maxCoeff(), 1e-7);
    }
    const auto c = io::coefficients_from_table(io::read_table(dir / "g_coeffs.csv"));
    EXPECT_EQ(*c.pattern, 1);
}

TEST(Cli, VerifyRoundTripReproducesResiduals) {
    TempDir dir;
    for (const std::string fmt : {"csv", "json"}) {
        const auto r1 = run({"frame", "--preset", "helix4d", "--type", "C", "--grid-n", "512", "--format", fmt, "--output",
                             dir / "h"});
        ASSERT_EQ(r1.code, 0) << r1.err;
        const auto r2 =
            run({"verify", "--frame", dir / ("h_frame." + fmt), "--expect", "C", "--preset", "helix4d", "--grid-n", "512"});
        ASSERT_EQ(r2.code, 0) << r2.err;
        for (const auto* key : {"residual_B", "residual_C", "residual_D", "residual_F", "orthogonality_defect", "tangent_defect"})
            EXPECT_NEAR(field(r1.out, key), field(r2.out, key), 1e-9) << key;
        const auto r3 = run({"verify", "--frame", dir / ("h_frame." + fmt), "--expect", "D"});
        EXPECT_EQ(r3.code, 2);
    }
}

TEST(Cli, ClassifyFrameAndCoefficients) {
    TempDir dir;
    ASSERT_EQ(run({"frame", "--preset", "helix4d", "--type", "F", "--grid-n", "512", "--output", dir / "f"}).code, 0);
    auto r = run({"classify", "--frame", dir / "f_frame.csv"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("types: F\n"), std::string::npos) << r.out;
    r = run({"classify", "--coeffs", dir / "f_coeffs.csv"});
    EXPECT_NE(r.out.find("types: F\n"), std::string::npos);
    EXPECT_EQ(run({"classify"}).code, 1);
}

TEST(Cli, ConvertFToDAndBToC) {
    TempDir dir;
    auto r = run({"convert", "--preset", "helix4d", "--from", "F", "--to", "D", "--grid-n", "512", "--output", dir / "d"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("passed: true"), std::string::npos);
    EXPECT_EQ(io::coefficients_from_table(io::read_table(dir / "d_coeffs.csv")).pattern, 7);
    r = run({"convert", "--preset", "circle", "--from", "B", "--to", "C", "--grid-n", "512"});
    EXPECT_EQ(r.code, 0) << r.err;
    ASSERT_EQ(run({"gallery", "export", "bumpYesC", "--grid-n", "128", "--output", dir / "bump"}).code, 0);
    r = run({"convert", "--coeffs", dir / "bump_coeffs.csv", "--from", "B", "--to", "C"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("AvoidanceFailed"), std::string::npos);
    EXPECT_EQ(run({"convert", "--preset", "helix4d", "--from", "D", "--to", "F", "--grid-n", "64"}).code, 1);
}

TEST(Cli, GalleryListAndExport) {
    TempDir dir;
    auto r = run({"gallery", "list"});
    EXPECT_EQ(r.code, 0);
    for (const auto& n : preset_names()) EXPECT_NE(r.out.find(n + ": "), std::string::npos);
    EXPECT_NE(r.out.find("bumpNoC"), std::string::npos);
    r = run({"gallery", "export", "noF", "--grid-n", "64", "--format", "json", "--output", dir / "nof"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "nof_curve.json"));
    EXPECT_EQ(run({"gallery", "export", "nope", "--output", dir / "x"}).code, 1);
}

TEST(Cli, GridDensityFromEnvironment) {
    ::setenv("FRAME4_GRID_N", "64", 1);
    EXPECT_EQ(cli::default_grid_density(), 64);
    const auto r = run({"frame", "--preset", "circle", "--type", "B"});
    EXPECT_NE(r.out.find(std::to_string(samples_for({0.0, 2 * std::numbers::pi}, 64)) + " samples"), std::string::npos)
        << r.out;
    ::setenv("FRAME4_GRID_N", "zero", 1);
    EXPECT_EQ(run({"frame", "--preset", "circle", "--type", "B"}).code, 1);
    ::unsetenv("FRAME4_GRID_N");
    EXPECT_EQ(cli::default_grid_density(), kDefaultGridDensity);
}
