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

#ifndef TTSCALE_EVALKIT_H_
#define TTSCALE_EVALKIT_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ttscale/core.h"

namespace ttscale {

// floor(i * m / k) for i in [0, k). K_EXCEEDS_M when k > m.
std::vector<std::size_t> UniformIntervalSample(std::size_t m, std::size_t k);

// Lowercase, newlines to spaces, whitespace runs collapsed, ends stripped.
std::string NormalizeText(std::string_view s);

// Decimal number with optional sign, thousands commas, exponent and a
// trailing '%' (divides by 100).
std::optional<double> ParseNumber(std::string_view s);

double ExactMatch(std::string_view pred, const std::vector<std::string>& answers);
double VqaScore(std::string_view pred, const std::vector<std::string>& answers);
double RelaxedMatch(std::string_view pred,
                    const std::vector<std::string>& answers,
                    double tolerance = 0.05);
// `math` additionally drops all whitespace before matching.
double SubstringMatch(std::string_view pred,
                      const std::vector<std::string>& answers,
                      bool math = false);

// First uppercase ASCII letter with no letter on either side. With
// `labels`, only those letters count.
std::optional<char> McqExtract(std::string_view pred,
                               std::string_view labels = {});
// First whole word "yes" or "no", case-insensitive, returned lowercase.
std::optional<std::string> YesNoExtract(std::string_view pred);

// LCS F-measure over normalized whitespace tokens, best reference wins.
double RougeL(std::string_view pred, const std::vector<std::string>& refs);
std::size_t LcsLength(const std::vector<std::string>& a,
                      const std::vector<std::string>& b);

std::string_view MetricName(Task task);

// Dispatches on rec.task.
MetricResult ScoreRecord(const QuestionRecord& rec, std::string_view pred);
// UNKNOWN_TASK when `task` names no metric.
MetricResult ScoreRecord(const QuestionRecord& rec, std::string_view task,
                         std::string_view pred);

}  // namespace ttscale

#endif  // TTSCALE_EVALKIT_H_
