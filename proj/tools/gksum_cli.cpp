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

// Command-line front end: summarize streams, answer quantile queries, verify
// against the exact oracle, and benchmark the maintenance strategies.
//
// Exit codes: 0 success, 1 input error, 2 configuration error,
// 3 verification failure.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gksum/gksum.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;

gksum::Algorithm algorithm_from_name(const std::string& name) {
  if (name == "greedy") return gksum::Algorithm::greedy_unweighted;
  if (name == "gk") return gksum::Algorithm::gk_unweighted;
  if (name == "wgk") return gksum::Algorithm::gk_weighted;
  if (name == "wgreedy") return gksum::Algorithm::greedy_weighted;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

gksum::ScheduleMode schedule_from_name(const std::string& name) {
  if (name == "every") return gksum::ScheduleMode::every_step;
  if (name == "paper") return gksum::ScheduleMode::paper_delay;
  throw std::invalid_argument("unknown schedule '" + name + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string token;
  std::stringstream in(text);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

struct InputConfig {
  std::string file;      // empty or "-" means stdin
  std::string gen_spec;  // takes precedence over file input
  std::optional<std::uint64_t> seed_override;
};

// Streams items from the configured source into `sink`; returns the exit
// code (input errors are reported on stderr with their line number).
template <class Sink>
int for_each_item(const InputConfig& input, Sink&& sink) {
  if (!input.gen_spec.empty()) {
    gksum::StreamSpec spec = gksum::parse_spec(input.gen_spec);
    if (input.seed_override) spec.seed = *input.seed_override;
    for (const auto& item : gksum::generate(spec)) sink(item);
    return kExitOk;
  }
  std::ifstream file;
  std::istream* in = &std::cin;
  if (!input.file.empty() && input.file != "-") {
    file.open(input.file);
    if (!file) {
      std::cerr << "error: cannot open '" << input.file << "'\n";
      return kExitInput;
    }
    in = &file;
  }
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(*in, line)) {
    ++line_no;
    try {
      if (const auto item = gksum::parse_line(line)) sink(*item);
    } catch (const std::exception& e) {
      std::cerr << "error: line " << line_no << ": " << e.what() << "\n";
      return kExitInput;
    }
  }
  return kExitOk;
}

struct SummarizeArgs {
  std::string epsilon_text = "0.01";
  std::string algo = "wgk";
  std::string schedule = "paper";
  bool smooth = false;
  std::string query_list;
  bool stats = false;
  std::uint64_t stats_interval = 1;
  bool verify = false;
  InputConfig input;
};

int run_summarize(const SummarizeArgs& args) {
  gksum::SummaryEngine<std::int64_t> engine(gksum::Fraction::parse_decimal(args.epsilon_text),
                                            algorithm_from_name(args.algo),
                                            schedule_from_name(args.schedule), args.smooth);
  std::vector<std::pair<std::string, gksum::Fraction>> queries;
  for (const auto& text : split_list(args.query_list)) {
    queries.emplace_back(text, gksum::Fraction::parse_decimal(text));
  }
  if (args.stats_interval == 0) throw std::invalid_argument("stats interval must be positive");

  std::optional<gksum::ExactOracle<std::int64_t>> oracle;
  if (args.verify) oracle.emplace();

  std::uint64_t next_stats = args.stats_interval;
  if (args.stats) {
    std::cout << "elements_seen,total_weight,time_step,summary_size\n";
  }
  const int rc = for_each_item(args.input, [&](const gksum::StreamItem& item) {
    engine.process(item.value, item.weight);
    if (oracle) oracle->add(item.value, item.weight);
    if (args.stats) {
      const auto& s = engine.summary();
      if (s.current_time() >= next_stats) {
        std::cout << s.elements_seen() << ',' << s.total_weight() << ',' << s.current_time()
                  << ',' << engine.size() << '\n';
        next_stats = s.current_time() + args.stats_interval;
      }
    }
  });
  if (rc != kExitOk) return rc;
  engine.flush();

  const auto& summary = engine.summary();
  std::cout << "size," << engine.size() << '\n';
  std::cout << "effective_epsilon," << engine.effective_epsilon().str() << '\n';
  std::cout << "total_weight," << summary.total_weight() << '\n';

  int exit_code = kExitOk;
  if (!queries.empty()) {
    const gksum::Snapshot<std::int64_t> snap(summary);
    std::cout << "phi,value,rmin,rmax\n";
    for (const auto& [text, phi] : queries) {
      const auto answer = snap.quantile(phi);
      std::cout << text << ',';
      if (answer.is_sentinel) {
        std::cout << "inf";
      } else {
        std::cout << *answer.value;
      }
      std::cout << ',' << answer.bounds.rmin << ',' << answer.bounds.rmax << '\n';
      if (oracle && !answer.is_sentinel) {
        std::string why;
        if (!oracle->check_answer(phi, *answer.value, engine.effective_epsilon(), &why)) {
          std::cerr << "verification failed: phi=" << text << ": " << why << "\n";
          exit_code = kExitVerify;
        }
      }
      if (oracle && answer.is_sentinel && oracle->total_weight() > 0) {
        std::cerr << "verification failed: phi=" << text << ": sentinel answered\n";
        exit_code = kExitVerify;
      }
    }
  }
  return exit_code;
}

struct BenchArgs {
  std::string epsilons = "0.01";
  std::string algos = "greedy,gk,wgreedy,wgk";
  std::string orders = "random";
  std::string lengths = "100000";
  std::string weights = "unit";
  std::string schedule = "paper";
  std::uint64_t seed = 1;
};

int run_bench(const BenchArgs& args) {
  const auto algos = split_list(args.algos);
  const auto epsilons = split_list(args.epsilons);
  const auto orders = split_list(args.orders);
  const auto lengths = split_list(args.lengths);
  const gksum::ScheduleMode mode = schedule_from_name(args.schedule);
  std::cout << "algorithm,epsilon,n,order,max_size,final_size,wall_ms,ns_per_item\n";
  for (const auto& algo_name : algos) {
    const gksum::Algorithm alg = algorithm_from_name(algo_name);
    for (const auto& eps_text : epsilons) {
      const gksum::Fraction eps = gksum::Fraction::parse_decimal(eps_text);
      for (const auto& len_text : lengths) {
        for (const auto& order_name : orders) {
          gksum::StreamSpec spec = gksum::parse_spec(order_name + ":" + args.weights + ":" +
                                                     std::to_string(args.seed) + ":" + len_text);
          if (!gksum::algorithm_is_weighted(alg)) spec.weights = gksum::WeightDist::unit;
          const auto stream = gksum::generate(spec);
          gksum::SummaryEngine<std::int64_t> engine(eps, alg, mode);
          std::size_t max_size = 0;
          const auto start = std::chrono::steady_clock::now();
          for (const auto& item : stream) {
            engine.process(item.value, item.weight);
            max_size = std::max(max_size, engine.size());
          }
          engine.flush();
          const auto stop = std::chrono::steady_clock::now();
          const auto ns =
              std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
          std::cout << algo_name << ',' << eps_text << ',' << len_text << ','
                    << order_name << ',' << max_size << ',' << engine.size() << ','
                    << ns / 1000000 << ','
                    << (stream.empty() ? 0 : ns / static_cast<long>(stream.size())) << '\n';
        }
      }
    }
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string epsilon_text = "0.05";
  std::string algo = "wgk";
  std::string schedule = "paper";
  bool smooth = false;
  std::uint64_t grid = 100;
  std::uint64_t inject_delta_fault = 0;
  InputConfig input;
};

int run_verify(const VerifyArgs& args) {
  gksum::VerifyOptions options;
  options.epsilon = gksum::Fraction::parse_decimal(args.epsilon_text);
  options.algorithm = algorithm_from_name(args.algo);
  options.schedule = schedule_from_name(args.schedule);
  options.smoothing = args.smooth;
  options.grid_den = args.grid;
  if (args.inject_delta_fault > 0) options.inject_delta_fault = args.inject_delta_fault;
  // Validates the configuration up front so bad epsilon exits with 2.
  gksum::SummaryEngine<std::int64_t>::ell_from_epsilon(options.epsilon);

  std::vector<gksum::StreamItem> stream;
  const int rc =
      for_each_item(args.input, [&](const gksum::StreamItem& item) { stream.push_back(item); });
  if (rc != kExitOk) return rc;

  const auto results = gksum::run_verification(stream, options);
  bool ok = true;
  std::cout << "check,result,detail\n";
  for (const auto& r : results) {
    std::cout << r.name << ',' << (r.pass ? "pass" : "fail") << ',' << r.detail << '\n';
    ok = ok && r.pass;
  }
  return ok ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming quantile summaries"};
  app.require_subcommand(1);

  SummarizeArgs sum;
  CLI::App* summarize = app.add_subcommand("summarize", "ingest a stream and answer queries");
  summarize->add_option("--epsilon", sum.epsilon_text, "target error, e.g. 0.01");
  summarize->add_option("--algo", sum.algo, "greedy|gk|wgreedy|wgk");
  summarize->add_option("--schedule", sum.schedule, "every|paper");
  summarize->add_flag("--smooth", sum.smooth, "spread deletion work across arrivals");
  summarize->add_option("--query", sum.query_list, "comma-separated phi list, e.g. 0.5,0.99");
  summarize->add_flag("--stats", sum.stats, "emit per-time-step stats rows");
  summarize->add_option("--stats-interval", sum.stats_interval, "time steps between stats rows");
  summarize->add_flag("--verify", sum.verify, "check each answer against the exact oracle");
  summarize->add_option("--input", sum.input.file, "input file ('-' for stdin)");
  summarize->add_option("--gen", sum.input.gen_spec, "generator spec order:weights:seed:n");
  std::int64_t sum_seed = -1;
  summarize->add_option("--seed", sum_seed, "override the generator seed");

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "size and speed table across a matrix");
  bench_cmd->add_option("--epsilons", bench.epsilons, "comma-separated epsilon list");
  bench_cmd->add_option("--algos", bench.algos, "comma-separated algorithm list");
  bench_cmd->add_option("--orders", bench.orders, "comma-separated order list");
  bench_cmd->add_option("--lengths", bench.lengths, "comma-separated stream lengths");
  bench_cmd->add_option("--weights", bench.weights, "unit | uniform(1..B) | zipf(s,B)");
  bench_cmd->add_option("--schedule", bench.schedule, "every|paper");
  bench_cmd->add_option("--seed", bench.seed, "generator seed");

  VerifyArgs verify;
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the invariant battery on a stream");
  verify_cmd->add_option("--epsilon", verify.epsilon_text, "target error");
  verify_cmd->add_option("--algo", verify.algo, "greedy|gk|wgreedy|wgk");
  verify_cmd->add_option("--schedule", verify.schedule, "every|paper");
  verify_cmd->add_flag("--smooth", verify.smooth, "verify the smoothed engine");
  verify_cmd->add_option("--grid", verify.grid, "quantile grid denominator");
  verify_cmd->add_option("--inject-delta-fault", verify.inject_delta_fault,
                         "testing aid: corrupt a delta after N updates");
  verify_cmd->add_option("--input", verify.input.file, "input file ('-' for stdin)");
  verify_cmd->add_option("--gen", verify.input.gen_spec, "generator spec order:weights:seed:n");
  std::int64_t verify_seed = -1;
  verify_cmd->add_option("--seed", verify_seed, "override the generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (summarize->parsed()) {
      if (sum_seed >= 0) sum.input.seed_override = static_cast<std::uint64_t>(sum_seed);
      return run_summarize(sum);
    }
    if (bench_cmd->parsed()) return run_bench(bench);
    if (verify_cmd->parsed()) {
      if (verify_seed >= 0) verify.input.seed_override = static_cast<std::uint64_t>(verify_seed);
      return run_verify(verify);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitConfig;
}
