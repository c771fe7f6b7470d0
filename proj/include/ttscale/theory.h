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

#ifndef TTSCALE_THEORY_H_
#define TTSCALE_THEORY_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ttscale {

// Expected maximum of n independent standard normals, by Gauss-Kronrod
// quadrature of n z phi(z) Phi(z)^(n-1) over [-10, 10]. k_n(1) is exactly 0.
double KN(int n);

struct SelectionModel {
  double mu_q = 0.0;
  double mu_s = 0.0;
  double sigma_q = 1.0;
  double sigma_s = 1.0;
  double rho = 0.0;
  int n = 1;

  void Validate() const;
};

// mu_q + rho * sigma_q * k_n.
double ExpectedSelectedQuality(const SelectionModel& model);

// Per-step base correctness p_t, per-step selector accuracy s_t, and the
// answer-level selector accuracy.
struct ChainParams {
  std::vector<double> p;
  std::vector<double> s_token;
  double s_answer = 1.0;
  int n = 1;
  double delta = 0.0;

  void Validate() const;
};

// prod_t s_t (1 - (1 - p_t)^n).
double PToken(const ChainParams& cp);
// s_answer (1 - (1 - prod_t p_t)^n).
double PAnswer(const ChainParams& cp);

// Smallest per-step selector accuracy that lifts step correctness to
// (1 + delta) p. INFEASIBLE when it exceeds 1.
double FeasibleSelectorAccuracy(double p, int n, double delta);

// First T in [1, t_max] where ((1 + delta) p)^T beats
// s_answer (1 - (1 - p^T)^n). NOT_FOUND when there is none.
int TheoremCheck(double p, double delta, int n, double s_answer, int t_max);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
};

// Brute-force oracles. Trials are split into `shards` chunks with derived
// seeds; shards run on their own threads.
MonteCarloEstimate MonteCarloKN(int n, std::int64_t trials, std::uint64_t seed,
                                int shards = 1);
MonteCarloEstimate MonteCarloSelectedQuality(const SelectionModel& model,
                                             std::int64_t trials,
                                             std::uint64_t seed, int shards = 1);
// Step-by-step selection: n candidates per step, selector right with s_t
// when at least one candidate is right.
MonteCarloEstimate SimulateTokenChain(const ChainParams& cp,
                                      std::int64_t trials, std::uint64_t seed);
// n whole answers, selector right with s_answer when one of them is right.
MonteCarloEstimate SimulateAnswerChain(const ChainParams& cp,
                                       std::int64_t trials, std::uint64_t seed);

// CSV sweeps: "n,k_n" and "T,p_token,p_answer".
void WriteKnCsv(std::ostream& out, const std::vector<int>& ns);
void WriteChainCsv(std::ostream& out, double p, double delta, int n,
                   double s_answer, int t_max);

}  // namespace ttscale

#endif  // TTSCALE_THEORY_H_
