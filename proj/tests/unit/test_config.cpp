#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "qthermo/config.hpp"
#include "qthermo/errors.hpp"

using namespace qthermo;

namespace {

std::string error_of(const std::string &text) {
    try {
        parse_config(text);
    } catch (const ConfigError &e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, EmptyObjectGivesDefaults) {
    const auto c = parse_config("{}");
    EXPECT_DOUBLE_EQ(c.pipeline.system.transmon.ec_ghz, TransmonSpec{}.ec_ghz);
    EXPECT_DOUBLE_EQ(c.pipeline.dissipation.bath_t_mk, DissipationSpec{}.bath_t_mk);
    EXPECT_EQ(c.output_dir, "qthermo_out");
    EXPECT_FALSE(c.pipeline.noiseless);
}

TEST(Config, NestedValuesAreRead) {
    const auto c = parse_config(R"({"seed": 9, "noiseless": true,
        "system": {"transmon": {"flux_quantum_fraction": 0.2}, "resonator": {"n_fock": 5}},
        "dissipation": {"bath_T_mK": 80.0},
        "protocol": {"quadratures": "I", "clamp_out_of_range": true},
        "montecarlo": {"estimator": "ols", "abscissa": "uniform", "lambda_grid": [0.5, 0.9]}})");
    EXPECT_EQ(c.pipeline.seed, 9u);
    EXPECT_TRUE(c.pipeline.noiseless);
    EXPECT_DOUBLE_EQ(c.pipeline.system.transmon.flux_quantum_fraction, 0.2);
    EXPECT_EQ(c.pipeline.system.resonator.n_fock, 5);
    EXPECT_DOUBLE_EQ(c.pipeline.dissipation.bath_t_mk, 80.0);
    EXPECT_EQ(c.pipeline.protocol.quadratures, Quadratures::I);
    EXPECT_TRUE(c.pipeline.protocol.clamp);
    EXPECT_EQ(c.montecarlo.spec.estimator, SlopeEstimator::OrdinaryLeastSquares);
    EXPECT_EQ(c.montecarlo.spec.abscissa, Abscissa::Uniform);
    EXPECT_EQ(c.montecarlo.lambda_grid, (std::vector<double>{0.5, 0.9}));
}

TEST(Config, UnknownKeyNamesItsPath) {
    const auto msg = error_of(R"({"system": {"transmon": {"ec": 0.3}}})");
    EXPECT_NE(msg.find("system.transmon.ec"), std::string::npos) << msg;
    EXPECT_NE(error_of(R"({"bogus": 1})").find("bogus"), std::string::npos);
}

TEST(Config, WrongTypeNamesItsPath) {
    const auto msg = error_of(R"({"readout": {"n_averages": "many"}})");
    EXPECT_NE(msg.find("readout.n_averages"), std::string::npos) << msg;
    EXPECT_FALSE(error_of(R"({"seed": -1})").empty());
    EXPECT_FALSE(error_of(R"({"system": 3})").empty());
    EXPECT_NE(error_of(R"({"protocol": {"quadratures": "Q"}})").find("protocol.quadratures"), std::string::npos);
}

TEST(Config, MalformedJsonIsConfigError) { EXPECT_FALSE(error_of("{\"seed\": ").empty()); }

TEST(Config, InvalidValuesAreRejected) {
    EXPECT_FALSE(error_of(R"({"dissipation": {"bath_T_mK": -5.0}})").empty());
    EXPECT_FALSE(error_of(R"({"montecarlo": {"n_experiments": 10}})").empty());
    EXPECT_FALSE(error_of(R"({"output_dir": ""})").empty());
    EXPECT_FALSE(error_of(R"({"montecarlo": {"lambda_grid": []}})").empty());
}

TEST(Config, DumpParsesBackIdentically) {
    auto c = parse_config(R"({"seed": 4, "readout": {"probe_amplitude": 0.003}, "dissipation": {"bath_T_mK": 120}})");
    const auto text = dump_config(c);
    const auto back = parse_config(text);
    EXPECT_EQ(dump_config(back), text);
    ASSERT_TRUE(back.pipeline.readout.probe_amplitude.has_value());
    EXPECT_DOUBLE_EQ(*back.pipeline.readout.probe_amplitude, 0.003);
    EXPECT_EQ(dump_config(parse_config(dump_config(RunConfig{}))), dump_config(RunConfig{}));
}

TEST(Config, LoadMissingFileNamesPath) {
    try {
        load_config("/nonexistent/dir/run.json");
        FAIL();
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/run.json"), std::string::npos);
    }
}

TEST(Config, LoadErrorsArePrefixedWithPath) {
    const auto path = (std::filesystem::temp_directory_path() / "qthermo_cfg_test.json").string();
    {
        std::ofstream(path) << R"({"pulses": {"guard": 1}})";
    }
    try {
        load_config(path);
        FAIL();
    } catch (const ConfigError &e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find(path), std::string::npos);
        EXPECT_NE(msg.find("pulses.guard"), std::string::npos);
    }
    std::filesystem::remove(path);
}
