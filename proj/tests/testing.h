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

// Shared fixtures and brute-force oracles for the unit tests and the
// acceptance binary. The oracles deliberately avoid the library's own
// aggregation and decoding code.
#ifndef TTSCALE_TESTS_TESTING_H_
#define TTSCALE_TESTS_TESTING_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ttscale/core.h"
#include "ttscale/decoder.h"
#include "ttscale/run_config.h"
#include "ttscale/toy_model.h"

namespace ttscale::testing {

// Error code thrown by `fn`, or nullopt when it returns normally.
template <typename Fn>
std::optional<ErrorCode> CodeOf(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

#define EXPECT_CODE(stmt, code) \
  EXPECT_EQ(::ttscale::testing::CodeOf([&] { stmt; }), std::optional(code))

// Random probability vector; `sparsity` is the chance an entry is zeroed
// (at least one entry always survives).
std::vector<double> RandomDistribution(std::mt19937_64& rng, int vocab,
                                       double sparsity = 0.0);
StepMatrix RandomStepMatrix(std::mt19937_64& rng, int n, int vocab);

// Plain-loop reference aggregations.
std::vector<double> OracleAverage(const std::vector<std::vector<double>>& rows);
std::vector<double> OracleEntropyWeighted(
    const std::vector<std::vector<double>>& rows);
int OracleMajority(const std::vector<std::vector<double>>& rows);
int OracleMostConfident(const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> Rows(const StepMatrix& m);

// Reference decode: enumerates every token sequence up to max_tokens and
// keeps the one that is greedy under `rule` at every step.
TokenSequence ExhaustiveGreedy(const ToyModel& model,
                               const std::vector<AugmentedInput>& inputs,
                               Aggregation rule, int max_tokens);

AugmentedInput TextInput(const std::string& prompt, int variant = 0);

// Toy model with `n_inputs` prompts "fixture i" and random table rows for
// every prefix shorter than `depth` over the non-EOS tokens.
ToyModelSpec RandomTreeSpec(std::uint64_t seed, int vocab, int n_inputs,
                            int depth);
std::vector<AugmentedInput> TreeInputs(int n_inputs);

// 20 exact-match records on a toy model. With n_aug = 4 and seed
// kE2eSeed, averaging fixes the baseline's answer on 5 records, 10 are
// right either way and 5 wrong either way.
inline constexpr std::uint64_t kE2eSeed = 2024;
inline constexpr int kE2eRecords = 20;
inline constexpr int kE2eFlips = 5;
inline constexpr int kE2eBothRight = 10;

struct E2eFixture {
  std::filesystem::path dataset;
  std::filesystem::path model;
};
// Writes e2e.jsonl and e2e_model.json into `dir`.
E2eFixture WriteE2eFixture(const std::filesystem::path& dir);
RunConfig E2eConfig(const E2eFixture& fx, Method method,
                    const std::filesystem::path& output_dir);

// Fresh empty directory under the system temp dir.
std::filesystem::path TempDir(const std::string& tag);

}  // namespace ttscale::testing

#endif  // TTSCALE_TESTS_TESTING_H_
