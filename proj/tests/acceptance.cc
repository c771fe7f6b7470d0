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

// Acceptance checks: one PASS/FAIL line per criterion, each with its
// runtime budget. Exit status is nonzero when any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "testing.h"
#include "ttscale/adapt.h"
#include "ttscale/decoder.h"
#include "ttscale/evalkit.h"
#include "ttscale/overhead.h"
#include "ttscale/run.h"
#include "ttscale/theory.h"
#include "ttscale/toy_model.h"

namespace {

using namespace ttscale;
namespace tt = ttscale::testing;

// Collects the first few failure messages of one criterion.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (notes_.size() < 5) notes_.push_back(what);
  }
  bool ok() const { return failures_ == 0; }
  std::string Summary() const {
    std::ostringstream s;
    s << failures_ << " failure(s)";
    for (const auto& n : notes_) s << "; " << n;
    return s.str();
  }

 private:
  int failures_ = 0;
  std::vector<std::string> notes_;
};

std::string Fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(10) << x;
  return s.str();
}

const std::vector<Aggregation> kRules{Aggregation::kAverage, Aggregation::kEntropyWeighted,
                                      Aggregation::kMajority, Aggregation::kMostConfident};

bool Close(const TokenDistribution& a, const TokenDistribution& b, double tol) {
  for (int v = 0; v < a.size(); ++v) {
    if (std::abs(a[v] - b[v]) > tol) return false;
  }
  return a.size() == b.size();
}

void AggregationRules(Check& c) {
  std::mt19937_64 rng(1001);
  for (int trial = 0; trial < 1200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const int v = 2 + static_cast<int>(rng() % 31);
    const StepMatrix m = tt::RandomStepMatrix(rng, n, v);
    auto rows = tt::Rows(m);
    std::shuffle(rows.begin(), rows.end(), rng);
    const StepMatrix p = StepMatrix::FromRows(rows);
    const std::string at = "trial " + std::to_string(trial);
    c.Expect(Close(AggregateAverage(m), AggregateAverage(p), 1e-15), at + " average permutation");
    c.Expect(Close(AggregateEntropyWeighted(m), AggregateEntropyWeighted(p), 1e-15),
             at + " entropy permutation");
    c.Expect(AggregateMajority(m) == AggregateMajority(p), at + " majority permutation");
    c.Expect(AggregateMostConfident(m) == AggregateMostConfident(p), at + " confident permutation");
    for (const auto& d : {AggregateAverage(m), AggregateEntropyWeighted(m)}) {
      double sum = 0;
      bool nonneg = true;
      for (double x : d.vector()) {
        sum += x;
        nonneg &= x >= 0;
      }
      c.Expect(nonneg && std::abs(sum - 1) < 1e-9, at + " validity");
    }
    const StepMatrix one({m.row(0)});
    c.Expect(AggregateAverage(one) == m.row(0), at + " N=1 average");
    c.Expect(AggregateEntropyWeighted(one) == m.row(0), at + " N=1 entropy");
    c.Expect(AggregateMajority(one) == m.row(0).Argmax(), at + " N=1 majority");
    c.Expect(AggregateMostConfident(one) == m.row(0).Argmax(), at + " N=1 confident");

    // Rows that permute one vector share its entropy.
    std::vector<std::vector<double>> same;
    std::vector<double> base = tt::Rows(m)[0];
    for (int i = 0; i < n; ++i) {
      std::shuffle(base.begin(), base.end(), rng);
      same.push_back(base);
    }
    const StepMatrix eq = StepMatrix::FromRows(same);
    c.Expect(Close(AggregateEntropyWeighted(eq), AggregateAverage(eq), 1e-9), at + " equal entropy");
  }
}

void DecoderOracle(Check& c) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const int n = 1 + static_cast<int>(seed % 4);
    ToyModelSpec spec = tt::RandomTreeSpec(seed, 4 + static_cast<int>(seed % 2), n, 3);
    spec.work_per_layer = 1;
    ToyModel model(spec);
    const auto inputs = tt::TreeInputs(n);
    for (Aggregation rule : kRules) {
      GenerationConfig cfg;
      cfg.n_aug = n;
      cfg.aggregation = rule;
      cfg.max_tokens = 3;
      cfg.record_distributions = true;
      auto seq = TtaugGenerate(model, inputs, cfg);
      const std::string at = "seed " + std::to_string(seed) + " " + std::string(ToString(rule));
      c.Expect(seq.tokens == tt::ExhaustiveGreedy(model, inputs, rule, 3), at + " oracle");
      cfg.execution = ExecutionMode::kParallel;
      auto par = TtaugGenerate(model, inputs, cfg);
      seq.wall_time_s = par.wall_time_s = 0;
      c.Expect(seq == par, at + " parallel trace");
    }
  }
}

void EarlyLayer(Check& c) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ToyModelSpec spec = tt::RandomTreeSpec(seed, 6, 3, 3);
    spec.num_layers = 2 + static_cast<int>(seed % 5);
    ToyModel model(spec);
    for (const auto& in : tt::TreeInputs(3)) {
      for (const TokenSequence& prefix : {TokenSequence{}, TokenSequence{2}, TokenSequence{3, 1}}) {
        const auto direct = model.Step(in, prefix);
        for (int layer = 1; layer <= model.num_layers(); ++layer) {
          c.Expect(model.ResumeFromHidden(model.StepHidden(in, prefix, layer), layer) == direct,
                   "seed " + std::to_string(seed) + " layer " + std::to_string(layer));
        }
      }
    }
    const AugmentedInput in = tt::TreeInputs(1)[0];
    GenerationConfig cfg;
    cfg.max_tokens = 3;
    const auto base = GreedyDecode(model, in, cfg);
    for (int n : {2, 3, 4, 7, 16}) {
      for (int layer = 1; layer <= model.num_layers(); ++layer) {
        GenerationConfig h = cfg;
        h.n_aug = n;
        h.layer = layer;
        const std::vector<AugmentedInput> copies(static_cast<size_t>(n), in);
        const auto t = TtaugGenerate(model, copies, h);
        c.Expect(t.tokens == base.tokens && t.token_logprobs == base.token_logprobs,
                 "identical branches n=" + std::to_string(n) + " layer " + std::to_string(layer));
      }
    }
  }
}

void Theory(Check& c) {
  c.Expect(KN(1) == 0.0, "k_1 = " + Fmt(KN(1)));
  c.Expect(std::abs(KN(2) - 1 / std::sqrt(M_PI)) < 1e-6, "k_2 = " + Fmt(KN(2)));
  for (int n : {4, 16, 64}) {
    const auto mc = MonteCarloKN(n, 10'000'000, 4000 + n, 4);
    c.Expect(std::abs(KN(n) - mc.mean) <= 3 * mc.std_error,
             "k_" + std::to_string(n) + " " + Fmt(KN(n)) + " vs " + Fmt(mc.mean));
  }
  ChainParams cp;
  cp.p = {0.8, 0.7, 0.9, 0.75};
  cp.s_token = {0.95, 0.9, 1.0, 0.97};
  cp.s_answer = 0.85;
  cp.n = 4;
  const auto token = SimulateTokenChain(cp, 1'000'000, 11);
  const auto answer = SimulateAnswerChain(cp, 1'000'000, 12);
  c.Expect(std::abs(PToken(cp) - token.mean) <= 3 * token.std_error,
           "p_token " + Fmt(PToken(cp)) + " vs " + Fmt(token.mean));
  c.Expect(std::abs(PAnswer(cp) - answer.mean) <= 3 * answer.std_error,
           "p_answer " + Fmt(PAnswer(cp)) + " vs " + Fmt(answer.mean));
  try {
    const int t = TheoremCheck(0.8, 0.125, 4, 1.0, 30);
    c.Expect(t <= 30, "crossover " + std::to_string(t));
  } catch (const Error& e) {
    c.Expect(false, e.what());
  }
}

void WeightOptimization(Check& c) {
  std::mt19937_64 rng(555);
  std::normal_distribution<double> normal;
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 8;
    const int v = 2 + (trial * 5) % 15;
    const StepMatrix m = tt::RandomStepMatrix(rng, n, v);
    std::vector<double> w(static_cast<size_t>(n));
    for (double& x : w) x = normal(rng);
    const auto grad = EntropyGradient(w, m);
    std::vector<double> fd(w.size());
    double scale = 0;
    for (size_t i = 0; i < w.size(); ++i) {
      auto a = w, b = w;
      a[i] += h;
      b[i] -= h;
      fd[i] = (MarginalEntropy(a, m) - MarginalEntropy(b, m)) / (2 * h);
      scale = std::max(scale, std::abs(fd[i]));
    }
    for (size_t i = 0; i < w.size(); ++i) {
      c.Expect(std::abs(grad[i] - fd[i]) <= 1e-5 * std::max(scale, 1e-6),
               "trial " + std::to_string(trial) + " entry " + std::to_string(i));
    }
  }
  const StepMatrix fixture = StepMatrix::FromRows({{1, 0}, {0.5, 0.5}});
  WeightOptConfig cfg;
  cfg.micro_steps = 200;
  const auto w = OptimizeStepWeights(fixture, cfg);
  c.Expect(w[0] > 0.9, "weight on deterministic row " + Fmt(w[0]));
  const std::vector<double> init{0.5, 0.5};
  const std::vector<double> raw{std::log(w[0]), std::log(w[1])};
  c.Expect(MarginalEntropy(raw, fixture) < MarginalEntropy(init, fixture), "entropy did not drop");
}

void TtadaptContract(Check& c) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ToyModel model(tt::RandomTreeSpec(seed, 5, 4, 3));
    const auto inputs = tt::TreeInputs(4);
    GenerationConfig gen;
    gen.n_aug = 4;
    gen.max_tokens = 3;
    const std::string at = "seed " + std::to_string(seed);

    const auto label = TtaugGenerate(model, inputs, gen).tokens;
    const auto loglik = [&] {
      double s = 0;
      for (const auto& in : inputs) s += SequenceLogLikelihood(model, in, label);
      return s;
    };
    std::vector<TokenDistribution> before;
    for (const auto& in : inputs) before.push_back(model.Step(in, label));
    const WeightSnapshot snap = model.CloneWeights();
    const double l0 = loglik();
    FineTuneOnPseudolabel(model, inputs, label, AdaptConfig{});
    c.Expect(loglik() >= l0, at + " likelihood decreased");
    model.RestoreWeights(snap);

    AdaptConfig cfg;
    TtadaptParamsGenerate(model, inputs, gen, cfg);
    for (size_t i = 0; i < inputs.size(); ++i) {
      c.Expect(model.Step(inputs[i], label) == before[i], at + " restore not bitwise");
    }
    cfg.pseudo_iterations = 1;
    c.Expect(TtadaptParamsGenerate(model, inputs, gen, cfg).tokens == label,
             at + " single iteration differs from TTAug");
  }
}

// Exhaustive subsequence search; `a` is the shorter side.
size_t BruteLcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  size_t best = 0;
  for (unsigned mask = 0; mask < (1u << a.size()); ++mask) {
    size_t j = 0, len = 0;
    bool ok = true;
    for (size_t i = 0; i < a.size() && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      ok = j < b.size();
      ++j;
      ++len;
    }
    if (ok) best = std::max(best, len);
  }
  return best;
}

std::vector<std::vector<std::string>> AllSequences(int max_len) {
  std::vector<std::vector<std::string>> out{{}};
  for (size_t i = 0; i < out.size(); ++i) {
    if (static_cast<int>(out[i].size()) == max_len) continue;
    for (const char* s : {"x", "y", "z"}) {
      auto longer = out[i];
      longer.push_back(s);
      out.push_back(std::move(longer));
    }
  }
  return out;
}

std::string Join(const std::vector<std::string>& s) {
  std::string out;
  for (const auto& t : s) out += (out.empty() ? "" : " ") + t;
  return out;
}

void Metrics(Check& c) {
  const auto eq = [&](double got, double want, const std::string& what) {
    c.Expect(std::abs(got - want) < 1e-12, what + " = " + Fmt(got));
  };
  c.Expect(UniformIntervalSample(10, 5) == std::vector<size_t>{0, 2, 4, 6, 8}, "sample 10/5");
  c.Expect(UniformIntervalSample(7, 3) == std::vector<size_t>{0, 2, 4}, "sample 7/3");
  c.Expect(UniformIntervalSample(5, 5) == std::vector<size_t>{0, 1, 2, 3, 4}, "sample k=M");
  c.Expect(NormalizeText("  A  Cat\n") == "a cat" && NormalizeText("").empty() &&
               NormalizeText("x") == "x",
           "normalize");
  eq(ExactMatch("Cat", {"cat"}), 1, "exact Cat");
  eq(ExactMatch("cats", {"cat"}), 0, "exact cats");
  eq(ExactMatch("", {""}), 1, "exact empty");
  eq(VqaScore("a", {"a", "a", "a", "b"}), 1, "vqa 3 matches");
  eq(VqaScore("a", {"a", "b", "c"}), 1.0 / 3, "vqa 1 match");
  eq(VqaScore("a", {"b"}), 0, "vqa 0 matches");
  eq(RelaxedMatch("10.2", {"10.0"}), 1, "relaxed 10.2");
  eq(RelaxedMatch("10.6", {"10.0"}), 0, "relaxed 10.6");
  eq(RelaxedMatch("5%", {"0.05"}), 1, "relaxed percent");
  eq(SubstringMatch("total is 71.10", {"71.10"}), 1, "substring");
  eq(SubstringMatch("71 . 10", {"71.10"}, true), 1, "substring math");
  eq(SubstringMatch("total", {"71.10"}), 0, "substring miss");
  c.Expect(McqExtract("The answer is (C).") == 'C', "mcq (C)");
  c.Expect(McqExtract("B") == 'B', "mcq B");
  c.Expect(!McqExtract("cabbage"), "mcq cabbage");
  eq(RougeL("a b c", {"a c"}), 0.8, "rouge a b c");
  eq(RougeL("a b c", {"a b c"}), 1, "rouge identical");
  eq(RougeL("a b", {"c d"}), 0, "rouge disjoint");

  const auto check = [&](const std::vector<std::string>& p, const std::vector<std::string>& r) {
    const size_t lcs = p.size() <= r.size() ? BruteLcs(p, r) : BruteLcs(r, p);
    double want = p.empty() && r.empty() ? 1.0 : 0.0;
    if (lcs > 0) {
      const double prec = double(lcs) / p.size(), rec = double(lcs) / r.size();
      want = 2 * prec * rec / (prec + rec);
    }
    const double got = RougeL(Join(p), {Join(r)});
    c.Expect(std::abs(got - want) < 1e-12, "'" + Join(p) + "' vs '" + Join(r) + "'");
  };
  // Every sequence up to length 8 against every reference up to length 4,
  // in both roles.
  const auto all8 = AllSequences(8);
  const auto all4 = AllSequences(4);
  for (const auto& p : all8) {
    for (const auto& r : all4) {
      check(p, r);
      check(r, p);
    }
  }
  // Random long pairs.
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20000; ++i) {
    check(all8[rng() % all8.size()], all8[rng() % all8.size()]);
  }
}

void EndToEnd(Check& c) {
  const auto dir = tt::TempDir("acceptance_e2e");
  const auto fx = tt::WriteE2eFixture(dir);
  const auto run = [&](Method m, const std::string& out, auto edit) {
    RunConfig cfg = tt::E2eConfig(fx, m, dir / out);
    edit(cfg);
    return RunEval(cfg);
  };
  const auto same = [](RunConfig&) {};
  const RunReport base = run(Method::kBaseline, "base", same);
  const RunReport aug = run(Method::kTtaug, "aug", same);
  const RunReport n1 = run(Method::kTtaug, "n1", [](RunConfig& c) { c.generation.n_aug = 1; });
  const RunReport none =
      run(Method::kTtaug, "none", [](RunConfig& c) { c.generation.modality = Modality::kNone; });
  c.Expect(aug.mean_score > base.mean_score,
           "ttaug " + Fmt(aug.mean_score) + " vs baseline " + Fmt(base.mean_score));
  const auto preds = [](const RunReport& r) {
    std::vector<std::string> out;
    for (const auto& m : r.records) out.push_back(m.prediction);
    return out;
  };
  c.Expect(preds(n1) == preds(base) && n1.mean_score == base.mean_score, "N=1 differs");
  c.Expect(preds(none) == preds(base) && none.mean_score == base.mean_score,
           "modality none differs");
  c.Expect(base.all_scored() && aug.all_scored(), "unscored records");
  std::filesystem::remove_all(dir);
}

void OverheadShape(Check& c) {
  ToyModel model(BenchmarkModelSpec(16, 8, 16));
  GenerationConfig cfg;
  cfg.max_tokens = 9;
  const auto result = BenchOverhead(model, BenchmarkInputs(16), {2, 16},
                                    {ExecutionMode::kSequential, ExecutionMode::kParallel}, 3, cfg);
  c.Expect(result.traces_identical, "traces differ across modes");
  double t2 = 0, t16 = 0;
  for (const auto& r : result.reports) {
    if (r.mode != ExecutionMode::kSequential) continue;
    (r.n_aug == 2 ? t2 : t16) = r.wall_time_s_per_query;
  }
  const double ratio = t16 / t2;
  c.Expect(ratio >= 4.0 * 0.7, "sequential N=16/N=2 ratio " + Fmt(ratio));
}

struct Criterion {
  const char* name;
  double budget_s;  // 0 when no runtime limit is set
  std::function<void(Check&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"aggregation_rules", 10, AggregationRules},
      {"decoder_oracle", 30, DecoderOracle},
      {"early_layer_consistency", 0, EarlyLayer},
      {"theory_quantitative", 120, Theory},
      {"weight_optimization", 30, WeightOptimization},
      {"ttadapt_contract", 0, TtadaptContract},
      {"metrics", 0, Metrics},
      {"end_to_end_fixture", 0, EndToEnd},
      {"overhead_shape", 0, OverheadShape},
  };
  int failed = 0;
  for (const Criterion& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.Expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.budget_s > 0 && secs > cr.budget_s) {
      check.Expect(false, "took " + Fmt(secs) + " s, budget " + Fmt(cr.budget_s) + " s");
    }
    std::cout << (check.ok() ? "PASS " : "FAIL ") << cr.name << " (" << std::fixed
              << std::setprecision(2) << secs << " s)";
    std::cout.unsetf(std::ios::floatfield);
    if (!check.ok()) std::cout << ": " << check.Summary();
    std::cout << std::endl;
    failed += !check.ok();
  }
  return failed == 0 ? 0 : 1;
}
