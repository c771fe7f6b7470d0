// Copyright 2026 The ttscale Authors.
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

// ttscale command-line entry point.
//
//   ttscale run --config run.json
//   ttscale theory --kn [--ns 1,2,4] | --chain --p 0.8 --delta 0.125 --n 4
//   ttscale bench-overhead --n 1,2,4,8,16 --mode both
//   ttscale augment --input record.json --out dir
//   ttscale serve --toy spec.json (--socket path | --stdio)

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ttscale/overhead.h"
#include "ttscale/remote_generator.h"
#include "ttscale/run.h"
#include "ttscale/run_config.h"
#include "ttscale/serialization.h"
#include "ttscale/theory.h"
#include "ttscale/toy_model.h"

namespace {

using namespace ttscale;

// Writes to `path`, or stdout when it is empty.
template <typename Fn>
void WithOutput(const std::string& path, Fn fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  fn(out);
}

int RunCommand(const std::string& config_path) {
  const RunConfig cfg = LoadRunConfig(config_path);
  const RunReport report = RunEval(cfg);
  WriteAggregateCsv(std::cout, report);
  for (const MetricResult& r : report.records) {
    if (r.error) std::cerr << "record " << r.id << " failed: " << *r.error << '\n';
  }
  return report.all_scored() ? 0 : 1;
}

struct TheoryArgs {
  bool kn = false;
  bool chain = false;
  std::vector<int> ns{1, 2, 4, 8, 16, 32, 64};
  double p = 0.8;
  double delta = 0.125;
  int n = 4;
  double s = 1.0;
  int t_max = 30;
  std::string out;
};

int TheoryCommand(const TheoryArgs& a) {
  if (a.kn == a.chain) throw Error(ErrorCode::kInvalidArgument, "pass exactly one of --kn, --chain");
  if (a.kn) {
    WithOutput(a.out, [&](std::ostream& o) { WriteKnCsv(o, a.ns); });
    return 0;
  }
  WithOutput(a.out, [&](std::ostream& o) { WriteChainCsv(o, a.p, a.delta, a.n, a.s, a.t_max); });
  try {
    const int t = TheoremCheck(a.p, a.delta, a.n, a.s, a.t_max);
    std::cerr << "crossover T = " << t << '\n';
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotFound) throw;
    std::cerr << "no crossover up to T = " << a.t_max << '\n';
  }
  return 0;
}

struct BenchArgs {
  std::vector<int> ns{1, 2, 4, 8, 16};
  std::string mode = "both";
  int repeats = 3;
  int work = 16;
  int steps = 8;
  std::string out;
};

int BenchCommand(const BenchArgs& a) {
  std::vector<ExecutionMode> modes;
  if (a.mode == "both") {
    modes = {ExecutionMode::kSequential, ExecutionMode::kParallel};
  } else {
    modes = {ParseExecutionMode(a.mode)};
  }
  int max_n = 1;
  for (int n : a.ns) max_n = std::max(max_n, n);
  ToyModel model(BenchmarkModelSpec(max_n, a.steps, a.work));
  GenerationConfig cfg;
  cfg.max_tokens = a.steps + 1;
  const OverheadResult result =
      BenchOverhead(model, BenchmarkInputs(max_n), a.ns, modes, a.repeats, cfg);
  WithOutput(a.out, [&](std::ostream& o) { WriteOverheadCsv(o, result.reports); });
  if (!result.traces_identical) {
    std::cerr << "parallel and sequential traces differ\n";
    return 1;
  }
  return 0;
}

struct AugmentArgs {
  std::string input;
  std::string out;
  int n_aug = 16;
  std::uint64_t seed = 0;
  std::string modality = "both";
  std::string strength = "high";
  std::string text_strategy = "classical";
  bool no_consistency = false;
  std::string toy_model;
};

int AugmentCommand(const AugmentArgs& a) {
  std::ifstream in(a.input);
  if (!in) throw Error(ErrorCode::kDatasetNotFound, "cannot open " + a.input);
  const QuestionRecord rec = Json::parse(in).get<QuestionRecord>();
  GenerationConfig cfg;
  cfg.n_aug = a.n_aug;
  cfg.modality = ParseModality(a.modality);
  cfg.image_strength = ParseImageStrength(a.strength);
  cfg.text_strategy = ParseTextStrategy(a.text_strategy);
  cfg.consistency_enforcement = !a.no_consistency;
  cfg.seed = a.seed;
  std::unique_ptr<ToyModel> model;
  if (!a.toy_model.empty()) model = ToyModel::FromFile(a.toy_model);
  const std::filesystem::path base = std::filesystem::path(a.input).parent_path();
  AugmentDump(OriginalInput(rec, base), cfg, DeriveQuestionSeed(a.seed, rec.id),
              a.out, model.get());
  return 0;
}

int ServeCommand(const std::string& toy, const std::string& socket, bool stdio) {
  if (socket.empty() == !stdio) {
    throw Error(ErrorCode::kInvalidArgument, "pass exactly one of --socket, --stdio");
  }
  std::unique_ptr<ToyModel> model = ToyModel::FromFile(toy);
  if (stdio) {
    ServeStream(*model, std::cin, std::cout);
  } else {
    ServeUnixSocket(*model, socket);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Test-time augmentation and adaptation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Evaluate a method on a dataset");
  run->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);

  TheoryArgs theory;
  auto* th = app.add_subcommand("theory", "Selection-theory tables as CSV");
  th->add_flag("--kn", theory.kn, "Expected maximum of n standard normals");
  th->add_flag("--chain", theory.chain, "Token- vs answer-level chain probabilities");
  th->add_option("--ns", theory.ns, "n values for --kn")->delimiter(',');
  th->add_option("--p", theory.p, "Per-token success probability");
  th->add_option("--delta", theory.delta, "Token-level selector margin");
  th->add_option("--n", theory.n, "Number of candidates");
  th->add_option("--s", theory.s, "Answer-level selector accuracy");
  th->add_option("--t-max", theory.t_max, "Longest chain length");
  th->add_option("--out", theory.out, "Output CSV (default stdout)");

  BenchArgs bench;
  auto* bo = app.add_subcommand("bench-overhead", "Wall time and memory versus N");
  bo->add_option("--n", bench.ns, "Comma-separated N values")->delimiter(',');
  bo->add_option("--mode", bench.mode, "sequential, parallel or both")
      ->check(CLI::IsMember({"sequential", "parallel", "both"}));
  bo->add_option("--repeats", bench.repeats, "Queries per measurement");
  bo->add_option("--work", bench.work, "Dense products per toy layer");
  bo->add_option("--steps", bench.steps, "Tokens per decode");
  bo->add_option("--out", bench.out, "Output CSV (default stdout)");

  AugmentArgs aug;
  auto* au = app.add_subcommand("augment", "Dump augmented prompts and images");
  au->add_option("--input", aug.input, "Question record (JSON object)")->required();
  au->add_option("--out", aug.out, "Output directory")->required();
  au->add_option("--n-aug", aug.n_aug, "Number of variants");
  au->add_option("--seed", aug.seed, "Run seed");
  au->add_option("--modality", aug.modality, "text, image, both or none");
  au->add_option("--strength", aug.strength, "Image strength: low, medium, high");
  au->add_option("--text-strategy", aug.text_strategy, "classical or self_paraphrase");
  au->add_flag("--no-consistency", aug.no_consistency, "Skip consistency enforcement");
  au->add_option("--toy-model", aug.toy_model, "Toy model spec used for self-paraphrase");

  std::string serve_toy, serve_socket;
  bool serve_stdio = false;
  auto* sv = app.add_subcommand("serve", "Serve a toy model over the line protocol");
  sv->add_option("--toy", serve_toy, "Toy model spec")->required();
  sv->add_option("--socket", serve_socket, "Unix socket path");
  sv->add_flag("--stdio", serve_stdio, "Serve on stdin/stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return RunCommand(config_path);
    if (*th) return TheoryCommand(theory);
    if (*bo) return BenchCommand(bench);
    if (*au) return AugmentCommand(aug);
    if (*sv) return ServeCommand(serve_toy, serve_socket, serve_stdio);
  } catch (const Error& e) {
    std::cerr << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
