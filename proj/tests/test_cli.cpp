#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "netrisk/commands.hpp"
#include "netrisk/sweep_io.hpp"

using namespace netrisk;

namespace {

const std::filesystem::path kData = NETRISK_TEST_DATA;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("netrisk_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::remove_all(dir_);
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::filesystem::path write(const std::string& name, const std::string& text) {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    int cli(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        args.insert(args.begin(), "netrisk");
        return cli::run_cli(args, out_, err_);
    }

    static std::string slurp(const std::filesystem::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    // Value printed as `key = value`.
    double printed(const std::string& key) const {
        std::istringstream in(out_.str());
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind(key + " = ", 0) == 0) return std::stod(line.substr(key.size() + 3));
        }
        ADD_FAILURE() << "no '" << key << "' in output:\n" << out_.str();
        return -1;
    }

    std::filesystem::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

const char* kSynthConfig = R"(seed = 1
[input]
synth_n = 60
[topology]
density = 0.1
[shock]
kind = uniform
theta = 0.4
)";

}  // namespace

TEST_F(CliTest, GenerateIsDeterministicAndLoadable) {
    const auto cfg = write("g.ini", kSynthConfig);
    ASSERT_EQ(cli({"generate", "--config", cfg.string(), "--out", (dir_ / "a").string()}), 0) << err_.str();
    ASSERT_EQ(cli({"generate", "--config", cfg.string(), "--out", (dir_ / "b").string()}), 0) << err_.str();
    EXPECT_EQ(slurp(dir_ / "a/network.csv"), slurp(dir_ / "b/network.csv"));
    EXPECT_EQ(slurp(dir_ / "a/network.json"), slurp(dir_ / "b/network.json"));
    const auto net = load_network(dir_ / "a/network.csv", dir_ / "a/network.json");
    const double rho = realized_density(net);
    EXPECT_GE(rho, 0.0);
    EXPECT_LE(rho, 1.0);
    EXPECT_EQ(net.size(), 60u);
}

TEST_F(CliTest, RunWithZeroShockReportsZero) {
    const auto cfg = write("z.ini", R"(seed = 3
[input]
synth_n = 50
[topology]
density = 0.2
[shock]
kind = uniform
theta = 0
)");
    ASSERT_EQ(cli({"run", "--config", cfg.string()}), 0) << err_.str();
    EXPECT_EQ(printed("e_loss"), 0.0);
}

TEST_F(CliTest, RunOnFixtureNetwork) {
    const auto cfg = write("f.ini", "[input]\ncsv = " + (kData / "two_bank.csv").string() +
                                        "\n[topology]\nnetwork = " + (kData / "two_bank_network.csv").string() +
                                        "\n[shock]\nkind = uniform\ntheta = 0.4\n[output]\ntrajectory = true\n");
    ASSERT_EQ(cli({"run", "--config", cfg.string(), "--out", (dir_ / "o").string()}), 0) << err_.str();
    EXPECT_NEAR(printed("e_loss"), 0.4, 1e-6);
    EXPECT_TRUE(std::filesystem::exists(dir_ / "o/report.json"));
    EXPECT_EQ(slurp(dir_ / "o/trajectory.csv").rfind("t,bank_id,h\n1,a,0.4\n", 0), 0u);
}

TEST_F(CliTest, MissingInputNamesPath) {
    const auto missing = (dir_ / "no_such_sheet.csv").string();
    const auto cfg = write("m.ini", "seed = 1\n[input]\ncsv = " + missing +
                                        "\n[topology]\ndensity = 0.1\n[shock]\nkind = uniform\ntheta = 0.1\n");
    const int rc = cli({"run", "--config", cfg.string()});
    EXPECT_EQ(rc, cli::kExitIo);
    EXPECT_NE(err_.str().find(missing), std::string::npos) << err_.str();
    EXPECT_NE(cli({"run", "--config", (dir_ / "absent.ini").string()}), 0);
}

TEST_F(CliTest, ValidationErrorsNameTheField) {
    const auto cfg = write("v.ini", "seed = 1\n[input]\nsynth_n = 20\n[topology]\ndensity = 1.5\n"
                                    "[shock]\nkind = uniform\ntheta = 0.1\n");
    EXPECT_EQ(cli({"run", "--config", cfg.string()}), cli::kExitValidation);
    EXPECT_NE(err_.str().find("density"), std::string::npos) << err_.str();

    const auto unknown = write("u.ini", "seed = 1\n[input]\nsynth_n = 20\nsynth_m = 3\n");
    EXPECT_EQ(cli({"generate", "--config", unknown.string()}), cli::kExitValidation);
    EXPECT_NE(err_.str().find("synth_m"), std::string::npos) << err_.str();

    const auto no_seed = write("s.ini", "[input]\nsynth_n = 20\n[topology]\ndensity = 0.1\n");
    EXPECT_EQ(cli({"generate", "--config", no_seed.string()}), cli::kExitValidation);
    EXPECT_EQ(cli({"generate", "--config", no_seed.string(), "--seed", "4", "--out", dir_.string()}), 0);

    EXPECT_NE(cli({"bogus"}), 0);
}

TEST_F(CliTest, SweepWritesRowsAndReproducesFromManifest) {
    const auto cfg = write("s.ini", std::string(kSynthConfig) +
                                        "[sweep]\nrecipe = fig1\nrho = 0.1,0.5\ntheta = 0,0.4\nreplicates = 2\n");
    ASSERT_EQ(cli({"sweep", "--config", cfg.string(), "--out", (dir_ / "a").string()}), 0) << err_.str();
    const auto csv = slurp(dir_ / "a/sweep.csv");
    const auto records = parse_sweep_csv(csv);
    EXPECT_EQ(records.size(), 8u);
    for (const auto& r : records) {
        if (r.theta == 0.0) {
            EXPECT_EQ(r.e_loss, 0.0);
        }
    }
    ASSERT_EQ(cli({"sweep", "--config", (dir_ / "a/manifest.json").string(), "--out", (dir_ / "b").string()}), 0)
        << err_.str();
    EXPECT_EQ(slurp(dir_ / "b/sweep.csv"), csv);
}

TEST_F(CliTest, BlocksSweepZeroMixing) {
    const auto cfg = write("b.ini", std::string(kSynthConfig) +
                                        "[sweep]\nrecipe = fig4\ntheta = 0.4\nmixing = 0,1\nreplicates = 2\n");
    ASSERT_EQ(cli({"sweep", "--config", cfg.string(), "--out", dir_.string()}), 0) << err_.str();
    const auto records = parse_sweep_csv(slurp(dir_ / "sweep.csv"));
    ASSERT_EQ(records.size(), 4u);
    for (const auto& r : records) {
        if (*r.mixing == 0.0) {
            EXPECT_EQ(r.e_loss_star, 0.0);
        }
    }
}
