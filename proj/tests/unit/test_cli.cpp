#include "cornerlog/cli_commands.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace cornerlog;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(CORNERLOG_DATA_DIR) + "/" + name; }

double value_of(const std::string& text, const std::string& key) {
    const auto pos = text.find(key + "=");
    if (pos == std::string::npos) return NAN;
    return std::strtod(text.c_str() + pos + key.size() + 1, nullptr);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("cornerlog_test_" + name)).string();
}

}  // namespace

TEST(CliConvert, RawToDoubleLog) {
    const auto r = cli({"convert", "--from", "raw", "--to", "double-log", "--r", "4.539992976e-05"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NEAR(value_of(r.out, "s"), 1.0 / std::log(10.0), 1e-9);
}

TEST(CliConvert, DoubleLogCornerIsZero) {
    const auto r = cli({"convert", "--from", "double-log", "--to", "raw", "--s", "0"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, "r=0\n");
}

TEST(CliConvert, SigmaToRho) {
    const auto r = cli({"convert", "--from", "raw", "--to", "single-log", "--sigma", "4.539993e-05+0i"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_NEAR(value_of(r.out, "rho"), 0.1, 1e-8);
}

TEST(CliConvert, SeventeenDigits) {
    const auto r = cli({"convert", "--from", "log", "--to", "single-log", "--T", "3"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, "t=0.33333333333333331\n");
}

TEST(CliConvert, DomainErrorsExitTwo) {
    auto r = cli({"convert", "--from", "raw", "--to", "double-log", "--r", "0.5"});
    EXPECT_EQ(r.code, kExitInput);
    EXPECT_NE(r.err.find("r = 0.5"), std::string::npos) << r.err;
    r = cli({"convert", "--from", "polar", "--to", "raw", "--r", "0.01"});
    EXPECT_EQ(r.code, kExitInput);
    r = cli({"convert", "--from", "raw", "--to", "log"});
    EXPECT_EQ(r.code, kExitInput);
    r = cli({"convert", "--from", "raw", "--to", "log", "--r", "abc"});
    EXPECT_EQ(r.code, kExitInput);
}

TEST(CliClassify, SingleLogRescaleIsC1NotC2) {
    const auto r = cli({"classify", "--map", "single-log-rescale", "--lambda", "2.718281828", "--order", "3",
                        "--expect", "C1-not-C2"});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("\"label\": \"C1-not-C2\""), std::string::npos);
}

TEST(CliClassify, CornerRescaleIsSmooth) {
    const auto r = cli({"classify", "--map", "corner-rescale", "--lambda", "2", "--order", "5", "--expect", "smooth"});
    EXPECT_EQ(r.code, kExitOk) << r.err << r.out;
}

TEST(CliClassify, IdentityDoubleLog) {
    const auto r = cli({"classify", "--map", "double-log-rescale", "--lambda", "1", "--order", "6"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("consistent-with-C-infinity-up-to-order-6"), std::string::npos) << r.out;
}

TEST(CliClassify, ExpectMismatchExitsThree) {
    const auto r = cli({"classify", "--map", "single-log-rescale", "--order", "3", "--expect", "smooth"});
    EXPECT_EQ(r.code, kExitExpect);
}

TEST(CliClassify, BadMapOrLambdaExitsTwo) {
    EXPECT_EQ(cli({"classify", "--map", "nope"}).code, kExitInput);
    EXPECT_EQ(cli({"classify", "--map", "corner-rescale", "--lambda", "-2"}).code, kExitInput);
    EXPECT_EQ(cli({"classify", "--map", "corner-rescale", "--order", "9"}).code, kExitInput);
}

TEST(CliPlumb, TwoSphereCrossRatio) {
    const auto out = temp_path("plumb.json");
    const auto r = cli({"plumb", "--tree", data("two_sphere.json"), "--sigma", "0.1", "--out", out});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto text = slurp(out);
    const double expected = std::pow(0.9 / 1.1, 2);
    const auto pos = text.find("\"i3.re\": ");
    ASSERT_NE(pos, std::string::npos) << text;
    EXPECT_NEAR(std::strtod(text.c_str() + pos + 9, nullptr), expected, 1e-12);
    std::filesystem::remove(out);
}

TEST(CliPlumb, TwoDiskTransport) {
    const auto r = cli({"plumb", "--tree", data("two_disk.json"), "--r", "0.1"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    // b1 sits at w = 1 on the bubble, so z = -r before normalization
    const auto pos = r.out.find("\"label\": \"b1\"");
    ASSERT_NE(pos, std::string::npos);
    const auto br = r.out.find('[', pos);
    EXPECT_NEAR(std::strtod(r.out.c_str() + br + 1, nullptr), -0.1, 1e-15);
}

TEST(CliPlumb, ZeroParametersEchoTheCenter) {
    const auto r = cli({"plumb", "--tree", "two-sphere"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("\"nodal\": [\n"), std::string::npos);
}

TEST(CliPlumb, SchemaErrorsNameTheField) {
    auto r = cli({"plumb", "--tree", data("bad_tree.json")});
    EXPECT_EQ(r.code, kExitInput);
    EXPECT_NE(r.err.find("/marked/0/colour"), std::string::npos) << r.err;

    const auto bad = temp_path("syntax.json");
    std::ofstream(bad) << "{\n  \"name\": \"x\",\n  \"components\": [\n}\n";
    r = cli({"plumb", "--tree", bad});
    EXPECT_EQ(r.code, kExitInput);
    EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
    std::filesystem::remove(bad);

    r = cli({"plumb", "--tree", "two-sphere", "--sigma", "0.1", "--sigma", "0.2"});
    EXPECT_EQ(r.code, kExitInput);
}

TEST(CliTransition, IdenticalPairIsIdentity) {
    const auto r = cli({"transition", "--pair", "two-sphere:identical", "--phi", "0.3+0.1i"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["p"], j["q"]);
    EXPECT_DOUBLE_EQ(j["p"]["phi"][0][0].get<double>(), 0.3);
}

TEST(CliTransition, PairFileIsAccepted) {
    const auto r = cli({"transition", "--pair", data("nonlinear_pair.json"), "--s", "0.6", "--phi", "0.6+0.1i"});
    EXPECT_EQ(r.code, kExitOk) << r.err;
}

TEST(CliVerify, RescaleSuitePasses) {
    const auto csv = temp_path("rescale.csv");
    const auto r = cli({"verify-decay", "--pair", "mixed-2-2:rescale", "--max-n", "1", "--out", csv});
    EXPECT_EQ(r.code, kExitOk) << r.out;
    EXPECT_NE(r.out.find("all estimates pass"), std::string::npos);
    EXPECT_EQ(slurp(csv).rfind("estimate_id,n,T_or_invphi,quantity,fitted_slope,fitted_intercept,r2,verdict\n", 0),
              0u);
    std::filesystem::remove(csv);
}

TEST(CliVerify, IdenticalSuiteIsVacuous) {
    const auto r = cli({"verify-decay", "--pair", "two-sphere:identical", "--max-n", "1"});
    EXPECT_EQ(r.code, kExitOk);
    std::istringstream is(r.out);
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind("angular-offset", 0) == 0 || line.rfind("all ", 0) == 0) continue;
        EXPECT_NE(line.find("vacuous-pass"), std::string::npos) << line;
    }
}

TEST(CliVerify, FailureExitsFour) {
    // an impossible decay rate
    const auto r = cli({"verify-decay", "--pair", "mixed-2-2:rescale", "--max-n", "1", "--estimates", "s-gap",
                        "--c-min", "5"});
    EXPECT_EQ(r.code, kExitDecay) << r.out;
}

TEST(CliVerify, InputErrorsExitTwo) {
    EXPECT_EQ(cli({"verify-decay", "--pair", "nope"}).code, kExitInput);
    EXPECT_EQ(cli({"verify-decay", "--pair", "mixed-2-2:rescale", "--estimates", "bogus"}).code, kExitInput);
    EXPECT_EQ(cli({"verify-decay", "--pair", "mixed-2-2:rescale", "--t-max", "80"}).code, kExitInput);
}

TEST(CliVerify, SeededRunsAreByteIdentical) {
    const std::vector<std::string> args = {"verify-decay", "--pair", "two-sphere-5:rescale", "--max-n", "1",
                                           "--estimates", "s-gap,chart-gap", "--v-samples", "2", "--seed", "7",
                                           "--no-halving"};
    const auto a = cli(args), b = cli(args);
    EXPECT_EQ(a.code, b.code);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("@v2"), std::string::npos);
}

TEST(CliConfig, FileSuppliesOptionsAndFlagsWin) {
    auto r = cli({"--config", data("verify.toml"), "verify-decay"});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out.find("s-derivative"), std::string::npos);
    r = cli({"--config", data("verify.toml"), "verify-decay", "--estimates", "s-gap"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out.find("log-gap"), std::string::npos);
    EXPECT_NE(r.out.find("s-gap"), std::string::npos);
}

TEST(CliGeneral, HelpAndUsage) {
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
    EXPECT_EQ(cli({}).code, kExitInput);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitInput);
}

TEST(CliBinary, ExitCodesFromTheExecutable) {
    const std::string bin = CORNERLOG_CLI_PATH;
    auto status = [](const std::string& cmd) {
        const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(s);
    };
    EXPECT_EQ(status(bin + " convert --from raw --to log --r 0.01"), 0);
    EXPECT_EQ(status(bin + " convert --from raw --to log --r 2"), 2);
    EXPECT_EQ(status(bin + " classify --map single-log-rescale --expect smooth"), 3);
}
