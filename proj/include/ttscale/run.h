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

#ifndef TTSCALE_RUN_H_
#define TTSCALE_RUN_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ttscale/core.h"
#include "ttscale/generator.h"
#include "ttscale/run_config.h"

namespace ttscale {

// seed_q = hash(seed, id). Depends on nothing but the record id, so one
// record's data never shifts another record's randomness.
std::uint64_t DeriveQuestionSeed(std::uint64_t seed, std::string_view id);

// The unaugmented input for a record. Relative image paths resolve against
// base_dir.
AugmentedInput OriginalInput(const QuestionRecord& rec,
                             const std::filesystem::path& base_dir = {});

// N inputs per cfg.modality. n_aug == 1 and modality none return only the
// original; otherwise every variant is augmented: text modes rewrite the
// prompt (classical pipeline or self-paraphrase, then optional consistency
// enforcement), image modes transform the image, and the other half stays
// fixed. `paraphraser` is only used for self-paraphrase.
std::vector<AugmentedInput> BuildAugmentedInputs(const AugmentedInput& original,
                                                 const GenerationConfig& cfg,
                                                 std::uint64_t seed_q,
                                                 Generator* paraphraser = nullptr);

// Runs cfg.method for one question and returns the stripped answer text.
std::string AnswerQuestion(Generator& g, const RunConfig& cfg,
                           const AugmentedInput& original, std::uint64_t seed_q);

struct RunReport {
  std::string benchmark;
  Method method = Method::kBaseline;
  // In dataset order; failed records carry an error and score 0.
  std::vector<MetricResult> records;
  std::size_t failed = 0;
  // Mean over records that were scored.
  double mean_score = 0.0;

  bool all_scored() const { return failed == 0; }
};

using GeneratorFactory = std::function<std::unique_ptr<Generator>()>;

// Evaluates without touching the filesystem beyond the dataset and images.
// Each worker gets its own generator from `factory`.
RunReport EvaluateRecords(const RunConfig& cfg,
                          const std::vector<QuestionRecord>& records,
                          const std::filesystem::path& base_dir,
                          const GeneratorFactory& factory);

// Loads the dataset, subsamples it, evaluates and writes records.jsonl and
// aggregate.csv into cfg.output_dir. DATASET_NOT_FOUND, MODEL_UNAVAILABLE.
RunReport RunEval(const RunConfig& cfg);
RunReport RunEval(const RunConfig& cfg, const GeneratorFactory& factory);

// "benchmark,method,records,failed,mean_score" plus one row.
void WriteAggregateCsv(std::ostream& out, const RunReport& report);

// Writes prompts.txt (one augmented prompt per line, newlines escaped) and
// variant_<i>.png for each augmented image.
void AugmentDump(const AugmentedInput& original, const GenerationConfig& cfg,
                 std::uint64_t seed, const std::filesystem::path& out_dir,
                 Generator* paraphraser = nullptr);

}  // namespace ttscale

#endif  // TTSCALE_RUN_H_
