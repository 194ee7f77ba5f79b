#include <gtest/gtest.h>

#include <sstream>

#include "octodyson/reporting.hpp"

using namespace octodyson;

TEST(Format, SeventeenDigitsRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(-2.5), "-2.5");
    const double v = 1.0 / 3.0;
    EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Json, ReportFields) {
    IdentityReport r{.suite = "s", .seed = 9};
    r.record(1e-3, 1e-2);
    r.record(1.0, 1e-2);
    const json j = to_json(r);
    EXPECT_EQ(j["suite"], "s");
    EXPECT_EQ(j["cases"], 2);
    EXPECT_EQ(j["failures"], 1);
    EXPECT_EQ(j["max_residual"], 1.0);
    EXPECT_EQ(j["seed"], 9);
    EXPECT_FALSE(j["passed"].get<bool>());
    const json all = to_json(std::vector<IdentityReport>{r, r});
    EXPECT_EQ(all["total"]["cases"], 4);
    EXPECT_EQ(all["suites"].size(), 2u);
}

TEST(IdentityReportTest, NonFiniteResidualFails) {
    IdentityReport r;
    r.record(std::nan(""), 1.0);
    EXPECT_FALSE(r.passed());
    EXPECT_TRUE(std::isinf(r.max_residual));
}

TEST(IdentityReportTest, EmptyPassesVacuously) {
    EXPECT_TRUE(IdentityReport{}.passed());
}

TEST(Sha256, KnownDigests) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Csv, HeaderAndRows) {
    SimulationConfig cfg;
    cfg.model = ModelKind::B;
    cfg.n = 2;
    cfg.samples = 2;
    SpectralSample s;
    s.distinct = {-1.0, 0.1};
    s.multiplicities = {8, 8};
    s.raw_spread = 0.0;
    SpectralSample bad;
    bad.distinct = {0.0};
    bad.multiplicities = {16};
    std::ostringstream os;
    write_spectrum_csv(os, cfg, {s, bad});
    EXPECT_EQ(os.str(),
              "sample_id,model,n,t,x1,x2,mult1,mult2,spread\n"
              "0,b,2,1,-1,0.10000000000000001,8,8,0\n"
              "1,b,2,1,nan,nan,0,0,0\n");
}

TEST(StatsJson, Keys) {
    SimulationConfig cfg;
    GapStatistics st;
    st.samples = 100;
    const json j = stats_json(cfg, st);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"model", "n", "t", "samples", "moment2", "moment4", "ratio",
                                              "implied_beta", "stderr", "seed"}));
}

TEST(VerifyAlgebra, DefaultPasses) {
    const auto reports = run_verify_algebra(kOctonionSigns, 0);
    EXPECT_TRUE(all_passed(reports));
    IdentityReport total;
    for (const auto& r : reports) total.absorb(r);
    EXPECT_GE(total.cases, 4096u);
}

TEST(VerifyAlgebra, TamperedTableFails) {
    const auto reports =
        run_verify_algebra(kOctonionSigns.with_flipped(SubsetLabel(0b011), SubsetLabel(0b100)), 0);
    EXPECT_FALSE(all_passed(reports));
}

TEST(VerifyIdentities, ModelASeven) {
    const auto reports = run_verify_identities(ModelKind::A, 2, 100, 7);
    EXPECT_TRUE(all_passed(reports));
    IdentityReport total;
    for (const auto& r : reports) total.absorb(r);
    EXPECT_LT(total.max_residual, 1e-8);
}

TEST(VerifyIdentities, ModelBThree) {
    EXPECT_TRUE(all_passed(run_verify_identities(ModelKind::B, 3, 100, 0)));
}

TEST(VerifyIdentities, ZeroTrials) {
    const auto reports = run_verify_identities(ModelKind::B, 2, 0, 0);
    EXPECT_TRUE(all_passed(reports));
    for (const auto& r : reports)
        if (r.suite != "multiplicity_root") {
            EXPECT_EQ(r.cases, 0u) << r.suite;
        }
}

TEST(VerifyIdentities, ModelARequiresDimensionTwo) {
    EXPECT_THROW(run_verify_identities(ModelKind::A, 3, 1, 0), std::invalid_argument);
}

TEST(Manifest, DigestsOutputs) {
    const std::string path = ::testing::TempDir() + "manifest_probe.txt";
    {
        std::ofstream(path) << "abc";
    }
    RunManifest m;
    m.command_line = {"octodyson", "verify-algebra"};
    m.seed = 3;
    m.add_output(path);
    const json j = m.to_json();
    EXPECT_EQ(j["outputs"][0]["sha256"], sha256_hex("abc"));
    EXPECT_EQ(j["version"], kVersion);
    EXPECT_EQ(j.dump(), m.to_json().dump());
    EXPECT_THROW(m.add_output(path + ".missing"), std::system_error);
}
