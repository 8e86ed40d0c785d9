// Copyright 2026 The gksum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

RunResult run_cli(const std::string& args, const std::string& stdin_text = "") {
  const std::string dir = ::testing::TempDir();
  const std::string out_path = dir + "/cli_out.txt";
  const std::string err_path = dir + "/cli_err.txt";
  const std::string in_path = dir + "/cli_in.txt";
  {
    std::ofstream in(in_path);
    in << stdin_text;
  }
  const std::string cmd = std::string(GKSUM_CLI_PATH) + " " + args + " <" + in_path + " >" +
                          out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

const char* kTinyStream = "5\n7\n# a comment\n7\n9,3\n";

TEST(Cli, SummarizeGolden) {
  const auto r = run_cli("summarize --epsilon 0.25 --algo wgk --query 0.5,1", kTinyStream);
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out,
            "size,4\n"
            "effective_epsilon,1/4\n"
            "total_weight,6\n"
            "phi,value,rmin,rmax\n"
            "0.5,7,3,3\n"
            "1,9,4,4\n");
}

TEST(Cli, SummarizeVerifiedGolden) {
  const auto r =
      run_cli("summarize --epsilon 0.25 --algo wgk --query 0.5,1 --verify", kTinyStream);
  EXPECT_EQ(r.exit_code, 0) << r.err;
}

TEST(Cli, SummarizeStatsGolden) {
  const auto r = run_cli("summarize --epsilon 0.25 --algo wgk --stats", kTinyStream);
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out,
            "elements_seen,total_weight,time_step,summary_size\n"
            "4,6,1,4\n"
            "size,4\n"
            "effective_epsilon,1/4\n"
            "total_weight,6\n");
}

TEST(Cli, SummarizeReportsBadLineNumber) {
  const auto r = run_cli("summarize --epsilon 0.1", "1\n2\nbogus\n4\n");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, BadEpsilonIsAConfigError) {
  EXPECT_EQ(run_cli("summarize --epsilon 1.5", "1\n").exit_code, 2);
  EXPECT_EQ(run_cli("verify --epsilon 1.5 --gen random:unit:1:10").exit_code, 2);
  EXPECT_EQ(run_cli("summarize --algo nope --epsilon 0.1", "1\n").exit_code, 2);
  EXPECT_EQ(run_cli("nonsense").exit_code, 2);
}

TEST(Cli, VerifiedGeneratorQueryPasses) {
  const auto r = run_cli(
      "summarize --epsilon 0.1 --algo wgk --gen random:unit:12:10000 --query 0.5 --verify");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("phi,value,rmin,rmax\n0.5,"), std::string::npos) << r.out;
}

TEST(Cli, GeneratorInputIsDeterministic) {
  const std::string args =
      "summarize --epsilon 0.1 --algo gk --gen random:unit:42:20000 --query 0.25,0.5,0.75";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  EXPECT_EQ(a.exit_code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, BenchTableShape) {
  const auto r = run_cli(
      "bench --algos gk,greedy --epsilons 0.1 --lengths 2000 --orders random,sorted --seed 7");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("algorithm,epsilon,n,order,max_size,final_size,wall_ms,ns_per_item\n"),
            std::string::npos);
  EXPECT_NE(r.out.find("gk,0.1,2000,random,"), std::string::npos);
  EXPECT_NE(r.out.find("greedy,0.1,2000,sorted,"), std::string::npos);
  // size columns are deterministic for a fixed seed
  const auto again = run_cli(
      "bench --algos gk,greedy --epsilons 0.1 --lengths 2000 --orders random,sorted --seed 7");
  auto sizes = [](const std::string& table) {
    std::string keep;
    std::size_t start = 0;
    while (start < table.size()) {
      std::size_t end = table.find('\n', start);
      if (end == std::string::npos) end = table.size();
      const std::string line = table.substr(start, end - start);
      std::size_t field = 0;
      std::size_t pos = 0;
      for (int commas = 0; commas < 6 && pos != std::string::npos; ++commas) {
        field = pos;
        pos = line.find(',', pos);
        if (pos != std::string::npos) ++pos;
      }
      keep += line.substr(0, field);  // everything before the timing columns
      keep += '\n';
      start = end + 1;
    }
    return keep;
  };
  EXPECT_EQ(sizes(r.out), sizes(again.out));
}

TEST(Cli, VerifySubcommandPassesAndFails) {
  const auto good =
      run_cli("verify --epsilon 0.1 --algo wgk --gen 'random:uniform(1..9):3:800'");
  EXPECT_EQ(good.exit_code, 0) << good.out << good.err;
  EXPECT_NE(good.out.find("invariant_1,pass"), std::string::npos);
  EXPECT_NE(good.out.find("coverage_audit,pass"), std::string::npos);

  const auto bad = run_cli(
      "verify --epsilon 0.1 --algo gk --gen random:unit:3:800 --inject-delta-fault 400");
  EXPECT_EQ(bad.exit_code, 3);
  EXPECT_NE(bad.out.find("invariant_1,fail"), std::string::npos) << bad.out;
}

TEST(Cli, SmoothedEngineVerifies) {
  const auto r = run_cli(
      "summarize --epsilon 0.05 --algo wgk --smooth --gen 'random:uniform(1..20):6:20000' "
      "--query 0.1,0.5,0.9 --verify");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  const auto bad = run_cli("summarize --epsilon 0.1 --schedule every --smooth", "1\n");
  EXPECT_EQ(bad.exit_code, 2);  // smoothing needs the delayed schedule
}

TEST(Cli, HelpExitsCleanly) {
  EXPECT_EQ(run_cli("--help").exit_code, 0);
}

}  // namespace
