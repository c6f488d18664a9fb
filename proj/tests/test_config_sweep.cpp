#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "diamond/config.hpp"
#include "diamond/sweep.hpp"

using namespace diamond;

namespace {

std::string message_of(const std::string& text) {
    try {
        (void)scenario_from_config(KeyValues::parse_string(text, "test.cfg"));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("diamond_test_" + name);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DIAMOND_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string csv_of(const SweepSpec& spec) {
    std::ostringstream out;
    write_csv(out, spec, run_sweep(spec));
    return out.str();
}

SweepSpec tiny_spec() {
    SweepSpec s;
    s.kind = SweepKind::conferencing;
    s.start = 0.0;
    s.stop = 1.0;
    s.steps = 3;
    s.gamma_db = 10.0;
    s.tgamma_db = 10.0;
    s.phase_draws = 2;
    s.quality = search::GridQuality::fast;
    return s;
}

}  // namespace

TEST(KeyValues, ParsesCommentsAndWhitespace) {
    const auto kv = KeyValues::parse_string("# header\n  a = 1.5  # trailing\n\nb=text\n");
    EXPECT_EQ(kv.number("a"), 1.5);
    EXPECT_EQ(kv.text("b"), "text");
    EXPECT_EQ(kv.line_of("b"), 4);
}

TEST(KeyValues, ReportsLineAndKey) {
    EXPECT_NE(message_of("gamma_db = 10\ntgamma_db = ten\n").find("test.cfg:2"), std::string::npos);
    EXPECT_NE(message_of("gamma_db = 10\ntgamma_db = ten\n").find("tgamma_db"), std::string::npos);
    EXPECT_NE(message_of("gamma_db = 10\ngamma_db = 11\n").find("test.cfg:2"), std::string::npos);
    EXPECT_NE(message_of("gamma_db = 10\ntgamma_db = 1\nbogus = 3\n").find("bogus"), std::string::npos);
    EXPECT_NE(message_of("gamma_db 10\n").find("test.cfg:1"), std::string::npos);
    EXPECT_NE(message_of("tgamma_db = 10\n").find("gamma_db"), std::string::npos);
}

TEST(ScenarioConfig, SnrForm) {
    const Scenario sc = scenario_from_config(KeyValues::parse_string("gamma_db = 10\ntgamma_db = 20\nc = 1.5\n"));
    const LinkSnrs s = snrs(sc);
    EXPECT_NEAR(s.gamma1, 10.0, 1e-12);
    EXPECT_NEAR(s.tgamma2, 100.0, 1e-10);
    EXPECT_EQ(sc.c12, 1.5);
    EXPECT_EQ(sc.c21, 1.5);
}

TEST(ScenarioConfig, DirectForm) {
    const Scenario sc = scenario_from_config(KeyValues::load(std::string(DIAMOND_CONFIG_DIR) + "/direct_gains.cfg"));
    EXPECT_EQ(sc.h1, Complex(2.0, 0.5));
    EXPECT_EQ(sc.g1, Complex(0.9, 0.0));
    EXPECT_EQ(sc.c21, 1.25);
}

TEST(ScenarioConfig, InvalidValuesAreConfigErrors) {
    EXPECT_THROW(scenario_from_config(KeyValues::parse_string("gamma_db = 10\ntgamma_db = 10\nc = -1\n")), ConfigError);
    EXPECT_THROW(scenario_from_config(KeyValues::parse_string("h1_re=1\nh2_re=1\ng1_re=1\ng2_re=1\nps=0\n")),
                 ConfigError);
}

TEST(SweepConfig, PresetShapes) {
    const SweepSpec f3 = preset("fig3");
    EXPECT_EQ(f3.grid().size(), 39u);
    EXPECT_DOUBLE_EQ(f3.grid().front(), -0.95);
    EXPECT_DOUBLE_EQ(f3.grid().back(), 0.95);
    EXPECT_NEAR(f3.grid()[19], 0.0, 1e-15);
    EXPECT_EQ(f3.c, 0.5);
    const SweepSpec a = preset("fig4a"), b = preset("fig4b");
    EXPECT_EQ(a.grid().size(), 25u);
    EXPECT_DOUBLE_EQ(a.grid()[20], 5.0);
    EXPECT_EQ(a.gamma_db, 30.0);
    EXPECT_EQ(a.tgamma_db, 10.0);
    EXPECT_EQ(b.gamma_db, 10.0);
    EXPECT_EQ(b.tgamma_db, 30.0);
    EXPECT_EQ(a.phase_draws, 32);
    EXPECT_THROW(preset("fig5"), ConfigError);
}

TEST(SweepConfig, ParsesSpecFile) {
    const SweepSpec s = sweep_spec_from_config(KeyValues::load(std::string(DIAMOND_CONFIG_DIR) + "/sweep_position.cfg"));
    EXPECT_EQ(s.kind, SweepKind::position);
    EXPECT_EQ(s.steps, 7);
    ASSERT_EQ(s.schemes.size(), 4u);
    EXPECT_EQ(s.schemes[3], Scheme::fcf);
    EXPECT_EQ(s.quality, search::GridQuality::fast);
}

TEST(SweepConfig, RejectsBadSpecs) {
    EXPECT_THROW(sweep_spec_from_config(KeyValues::parse_string("kind = position\nstart=-1\nstop=0\nsteps=3\n")),
                 ConfigError);
    EXPECT_THROW(sweep_spec_from_config(KeyValues::parse_string("preset = fig3\nschemes = df,xyz\n")), ConfigError);
    EXPECT_THROW(sweep_spec_from_config(KeyValues::parse_string("preset = fig3\nsteps = 1\n")), ConfigError);
    EXPECT_THROW(sweep_spec_from_config(KeyValues::parse_string("kind = diagonal\nstart=0\nstop=1\nsteps=3\n")),
                 ConfigError);
}

TEST(SchemeList, CanonicalOrder) {
    const auto s = parse_scheme_list("af,df,upper");
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0], Scheme::upper);
    EXPECT_EQ(s[2], Scheme::af);
    EXPECT_EQ(parse_scheme_list("all").size(), 6u);
    EXPECT_THROW(parse_scheme_list(""), ConfigError);
}

TEST(Csv, HeaderAndSeedLine) {
    const std::string csv = csv_of(tiny_spec());
    std::istringstream in(csv);
    std::string first, header;
    std::getline(in, first);
    std::getline(in, header);
    EXPECT_EQ(first.rfind("# seed=1", 0), 0u);
    EXPECT_EQ(header.rfind("x,upper,df,pcf,fcf,ccf,af,lambda_df,", 0), 0u);
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    EXPECT_EQ(rows, 3);
}

TEST(Csv, SixSignificantDigits) {
    EXPECT_EQ(format_number(1.23456789), "1.23457");
    EXPECT_EQ(format_number(0.0), "0");
}

TEST(Csv, ByteIdenticalForFixedSeed) {
    EXPECT_EQ(csv_of(tiny_spec()), csv_of(tiny_spec()));
}

TEST(Csv, SeedChangesPhaseAveragedColumnsOnly) {
    SweepSpec a = tiny_spec(), b = tiny_spec();
    a.schemes = b.schemes = {Scheme::upper, Scheme::df};
    b.seed = 9;
    const auto ra = run_sweep(a), rb = run_sweep(b);
    for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_EQ(ra[i].rate.at(Scheme::df), rb[i].rate.at(Scheme::df));
}

TEST(Sweep, FcfIsZeroWithoutConferencing) {
    SweepSpec s = tiny_spec();
    s.schemes = {Scheme::upper, Scheme::fcf};
    const auto rows = run_sweep(s);
    EXPECT_EQ(rows.front().x, 0.0);
    EXPECT_EQ(rows.front().rate.at(Scheme::fcf), 0.0);
    EXPECT_GT(rows.back().rate.at(Scheme::fcf), 0.0);
}

TEST(Sweep, PhaseSeedsDiffer) {
    EXPECT_NE(phase_seed(1, 0), phase_seed(1, 1));
    EXPECT_NE(phase_seed(1, 0), phase_seed(2, 0));
}

TEST(Cli, RatesSucceeds) {
    EXPECT_EQ(run_cli("rates " + std::string(DIAMOND_CONFIG_DIR) + "/snr_10db.cfg --grid-quality fast"), 0);
}

TEST(Cli, ConfigErrorsExitTwo) {
    const auto bad = temp_path("bad.cfg");
    std::ofstream(bad) << "gamma_db = 10\ntgamma_db = nope\n";
    EXPECT_EQ(run_cli("rates " + bad.string()), 2);
    EXPECT_EQ(run_cli("rates /nonexistent/file.cfg"), 2);
    EXPECT_EQ(run_cli("rates " + std::string(DIAMOND_CONFIG_DIR) + "/snr_10db.cfg --grid-quality extreme"), 2);
    EXPECT_EQ(run_cli("reproduce fig9 -o " + temp_path("x.csv").string()), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    std::filesystem::remove(bad);
}

TEST(Cli, SweepWritesDeterministicCsv) {
    const auto out1 = temp_path("s1.csv"), out2 = temp_path("s2.csv");
    const std::string spec = std::string(DIAMOND_CONFIG_DIR) + "/sweep_position.cfg";
    ASSERT_EQ(run_cli("sweep " + spec + " -o " + out1.string() + " --seed 4"), 0);
    ASSERT_EQ(run_cli("sweep " + spec + " -o " + out2.string() + " --seed 4"), 0);
    const std::string a = read_file(out1);
    EXPECT_EQ(a, read_file(out2));
    EXPECT_NE(a.find("# seed=4"), std::string::npos);
    EXPECT_NE(a.find("x,upper,df,pcf,fcf,lambda_df"), std::string::npos);
    std::filesystem::remove(out1);
    std::filesystem::remove(out2);
}
