#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("bandgap_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path config(const std::string& name, const std::string& text) {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    int run(const std::string& args, const fs::path& out) {
        const std::string cmd = std::string(BANDGAP_EXE) + " " + args + " --out " + out.string() + " > " +
                                (dir_ / "stdout.txt").string() + " 2> " + (dir_ / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string stderr_text() const {
        std::ifstream in(dir_ / "stderr.txt");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, Figure3) {
    const auto cfg = config("f3.json", R"({"experiment":"figure3","L":0.5,"r":0.076923,"T":17})");
    ASSERT_EQ(run("figure3 --config " + cfg.string(), dir_ / "out"), 0) << stderr_text();
    std::ifstream in(dir_ / "out" / "figure3.csv");
    std::string header, columns, line;
    std::getline(in, header);
    std::getline(in, columns);
    EXPECT_EQ(header.rfind("# bandgap ", 0), 0u);
    EXPECT_EQ(columns, "theta,branch,sqrt_lambda");
    std::set<std::string> branches;
    while (std::getline(in, line)) {
        const auto a = line.find(','), b = line.find(',', a + 1);
        branches.insert(line.substr(a + 1, b - a - 1));
    }
    EXPECT_EQ(branches, (std::set<std::string>{"omega_0", "omega_1", "omega_2", "omega_3", "omega_4", "eta_1_1"}));
}

TEST_F(Cli, Certificate) {
    const auto cfg = config("c.json", R"({"experiment":"certificate","L":0.5,"r":0.076923,"m":2})");
    ASSERT_EQ(run("certificate --config " + cfg.string(), dir_ / "out"), 0) << stderr_text();
    std::ifstream in(dir_ / "out" / "certificate.json");
    const auto doc = nlohmann::json::parse(in);
    EXPECT_EQ(doc["verdict"], "certified");
    EXPECT_EQ(doc["meta"]["config"]["m"], 2);
}

TEST_F(Cli, BandsDeterministic) {
    const auto cfg = config("b.json", R"({"geometry":"flat-cylinder","d":2,"r":0.2,"L":1.0,"T":9,"k_max":4,
                                          "lambda_max":40,"mesh":{"h_body":0.02}})");
    ASSERT_EQ(run("bands --threads 1 --config " + cfg.string(), dir_ / "a"), 0) << stderr_text();
    ASSERT_EQ(run("bands --threads 4 --config " + cfg.string(), dir_ / "b"), 0) << stderr_text();
    EXPECT_EQ(slurp(dir_ / "a" / "bands.csv"), slurp(dir_ / "b" / "bands.csv"));
    std::ifstream in(dir_ / "a" / "gaps.json");
    const auto gaps = nlohmann::json::parse(in);
    EXPECT_EQ(gaps["count"], 0);
    EXPECT_TRUE(gaps.contains("lambda_max"));
    EXPECT_TRUE(gaps["gaps"].is_array());
}

TEST_F(Cli, SelfTest) {
    const auto cfg = config("m.json", R"({"experiment":"minmax-selftest","seed":5,"instances":50})");
    ASSERT_EQ(run("minmax-selftest --config " + cfg.string(), dir_ / "out"), 0) << stderr_text();
    std::ifstream in(dir_ / "out" / "minmax_selftest.json");
    const auto doc = nlohmann::json::parse(in);
    EXPECT_EQ(doc["passed"], true);
    EXPECT_EQ(doc["cases"].size(), 50u);
}

TEST_F(Cli, ConfigErrors) {
    EXPECT_EQ(run("bands --config " + config("e.json", R"({"experiment":"bands"})").string(), dir_ / "out"), 2);
    EXPECT_NE(stderr_text().find("geometry"), std::string::npos);
    EXPECT_EQ(run("bands --config " + (dir_ / "missing.json").string(), dir_ / "out"), 2);
    EXPECT_EQ(run("bands --config " + config("bad.json", "{nope").string(), dir_ / "out"), 2);
    EXPECT_EQ(run("limit2d --config " + config("l.json", R"({"experiment":"figure3","L":0.5,"r":0.1})").string(),
                  dir_ / "out"),
              2);
    EXPECT_EQ(run("frobnicate --config x", dir_ / "out"), 2);
    EXPECT_EQ(run("bands", dir_ / "out"), 2);
}
