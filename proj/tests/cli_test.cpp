// Copyright 2026 The cftrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cftrace::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) lines.push_back(l);
    return lines;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("cftrace_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        unsetenv(cftrace::cli::kOutputDirEnv);
    }
    void TearDown() override {
        unsetenv(cftrace::cli::kOutputDirEnv);
        fs::remove_all(dir_);
    }
    fs::path dir_;
};

}  // namespace

TEST(Cli, SimulateLiBit1) {
    const auto r = run({"simulate", "--kind", "li", "--bit", "1", "--M", "8", "--N", "8", "--epsilon", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = split_lines(r.out);
    EXPECT_EQ(lines.front(), "kind,M,N,bit,epsilon,outcome,prob");
    bool seen = false;
    for (const auto& l : lines)
        if (l.find(",D2,") != std::string::npos) {
            seen = true;
            const double p = std::stod(l.substr(l.rfind(',') + 1));
            EXPECT_NEAR(p, 1, 1e-12);
        }
    EXPECT_TRUE(seen);
}

TEST(Cli, CompareSalihJson) {
    const auto r = run({"compare", "--kind", "salih", "--bit", "0", "--M", "8", "--N", "400", "--epsilon", "0.01",
                        "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc.at("schema_version"), cftrace::cli::kSchemaVersion);
    EXPECT_EQ(doc.at("command"), "compare");
    EXPECT_EQ(doc.at("config").at("M"), 8);
    ASSERT_EQ(doc.at("rows").size(), 1u);
    const auto& row = doc.at("rows")[0];
    EXPECT_NEAR(row.at("trace_detect_prob").get<double>() / 5.95e-5, 1, 0.20);
    EXPECT_EQ(row.at("verdict"), "not counterfactual");
    EXPECT_EQ(doc.at("columns").size(), row.size());
}

TEST(Cli, CsvNumberFormat) {
    const auto r = run({"standard", "--paths", "4", "--epsilon", "0.01"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = split_lines(r.out);
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0], "n_paths,epsilon,delta,detect_prob,eps2_over_n,shift_sum");
    EXPECT_NE(lines[1].find("e-"), std::string::npos);
    EXPECT_EQ(lines[1].find('E'), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({"keydist", "--rounds", "0"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"simulate", "--kind", "li", "--M", "7", "--N", "8"}).code, 2);
    EXPECT_EQ(run({"simulate", "--kind", "salih", "--M", "8", "--N", "80", "--bit", "2"}).code, 2);
    EXPECT_EQ(run({"compare", "--kind", "salih", "--M", "8", "--N", "80", "--epsilon", "0.1", "--delta", "1",
                   "--Delta", "2"})
                  .code,
              2);
    EXPECT_EQ(run({"compare", "--kind", "simple", "--N", "4"}).code, 2);
    EXPECT_EQ(run({"sweep", "--kind", "li"}).code, 2);
    EXPECT_EQ(run({"simulate", "--kind", "li", "--M", "8", "--N", "8", "--format", "xml"}).code, 2);
    const auto r = run({"keydist", "--rounds", "0"});
    EXPECT_NE(r.err.find("rounds"), std::string::npos);
}

TEST(Cli, RegimeWarningsGoToDiagnostics) {
    const auto r = run({"compare", "--kind", "salih", "--bit", "0", "--M", "4", "--N", "8", "--epsilon", "0.01"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_EQ(r.out.find("warning"), std::string::npos);
}

TEST(Cli, RepeatsAreByteIdentical) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"keydist", "--N", "10", "--rounds", "2000", "--seed", "3", "--eve-path", "1,4"},
             {"sweep", "--kind", "li", "--Ms", "16,8", "--Ns", "8,16", "--bits", "0,1", "--epsilons", "0.001"},
             {"eve", "--kind", "salih", "--M", "6", "--N", "30", "--bit", "0", "--eve-chain", "5", "--format", "json"},
             {"bohm", "--kind", "li", "--M", "16", "--N", "16", "--format", "json"}}) {
        const auto a = run(args);
        const auto b = run(args);
        ASSERT_EQ(a.code, 0) << a.err;
        EXPECT_EQ(a.out, b.out);
    }
}

TEST(Cli, SweepRowsSorted) {
    const auto r = run({"sweep", "--kind", "li", "--Ms", "16,8", "--Ns", "16,8", "--bits", "1,0", "--epsilons",
                        "0.001", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = nlohmann::json::parse(r.out).at("rows");
    ASSERT_EQ(rows.size(), 8u);
    auto key = [](const nlohmann::json& row) {
        return std::tuple{row.at("M").get<int>(), row.at("N").get<int>(), row.at("bit").get<int>()};
    };
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(key(rows[i - 1]), key(rows[i]));
}

TEST(Cli, KeydistReportsSeed) {
    const auto r = run({"keydist", "--N", "10", "--rounds", "1000", "--seed", "77", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto row = nlohmann::json::parse(r.out).at("rows")[0];
    EXPECT_EQ(row.at("seed"), 77);
    EXPECT_EQ(row.at("errors"), 0);
}

TEST_F(TempDir, WritesFileAtomically) {
    const auto path = dir_ / "out.csv";
    const auto r = run({"bohm", "--kind", "li", "--M", "16", "--N", "16", "--output", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    EXPECT_TRUE(fs::exists(path));
    EXPECT_FALSE(fs::exists(dir_ / "out.csv.tmp"));
    EXPECT_EQ(slurp(path).substr(0, 5), "kind,");
}

TEST_F(TempDir, FailedRunLeavesNoFile) {
    const auto path = dir_ / "bad.csv";
    EXPECT_EQ(run({"simulate", "--kind", "li", "--M", "7", "--N", "8", "--output", path.string()}).code, 2);
    EXPECT_EQ(run({"keydist", "--rounds", "0", "--output", path.string()}).code, 2);
    EXPECT_FALSE(fs::exists(path));
    EXPECT_TRUE(fs::is_empty(dir_));
    const auto occupied = dir_ / "taken";
    fs::create_directories(occupied / "inner");
    EXPECT_EQ(run({"bohm", "--kind", "li", "--M", "16", "--N", "16", "--output", occupied.string()}).code, 1);
    EXPECT_FALSE(fs::exists(dir_ / "taken.tmp"));
    EXPECT_TRUE(fs::is_directory(occupied));
}

TEST_F(TempDir, EnvironmentOutputDirectory) {
    setenv(cftrace::cli::kOutputDirEnv, dir_.c_str(), 1);
    auto r = run({"standard", "--paths", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir_ / "standard.csv"));
    r = run({"standard", "--paths", "3", "--output", "rel.json", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir_ / "rel.json"));
    r = run({"standard", "--paths", "3", "--output", "-"});
    EXPECT_FALSE(r.out.empty());
}

TEST_F(TempDir, ConfigFileWithFlagOverride) {
    const auto cfg = dir_ / "run.ini";
    std::ofstream(cfg) << "kind=li\nM=8\nN=8\nbit=1\nepsilon=0\n";
    auto r = run({"simulate", "--config", cfg.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("li,8,8,1"), std::string::npos);
    r = run({"simulate", "--config", cfg.string(), "--bit", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("li,8,8,0"), std::string::npos);
}
