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

#include "ttscale/evalkit.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <sstream>

namespace ttscale {
namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Non-ASCII bytes count as letters so accented words are never split.
bool IsLetterByte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalpha(u) != 0;
}

std::vector<std::string> Tokens(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(NormalizeText(s))};
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::string StripAllSpace(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), IsSpace), s.end());
  return s;
}

std::optional<char> GoldLabel(const QuestionRecord& rec,
                              const std::string& answer) {
  std::string a = NormalizeText(answer);
  if (a.size() == 1 && std::isalpha(static_cast<unsigned char>(a[0]))) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(a[0])));
  }
  for (const Choice& c : rec.choices) {
    if (NormalizeText(c.text) == a) return c.label[0];
  }
  return std::nullopt;
}

MetricResult Make(const QuestionRecord& rec, Task task, std::string_view pred,
                  double score) {
  MetricResult r;
  r.id = rec.id;
  r.score = score;
  r.metric_name = std::string(MetricName(task));
  r.prediction = std::string(pred);
  return r;
}

}  // namespace

std::vector<std::size_t> UniformIntervalSample(std::size_t m, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (k > m) {
    throw Error(ErrorCode::kKExceedsM, "cannot draw " + std::to_string(k) +
                                           " of " + std::to_string(m));
  }
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(i * m / k);
  return out;
}

std::string NormalizeText(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::optional<double> ParseNumber(std::string_view s) {
  std::string t = NormalizeText(s);
  bool percent = false;
  if (!t.empty() && t.back() == '%') {
    percent = true;
    t.pop_back();
    while (!t.empty() && t.back() == ' ') t.pop_back();
  }
  static const std::regex kGrouped(R"(^[+-]?\d{1,3}(,\d{3})+(\.\d*)?$)");
  if (std::regex_match(t, kGrouped)) t.erase(std::remove(t.begin(), t.end(), ','), t.end());
  static const std::regex kNumber(R"(^[+-]?(\d+\.?\d*|\.\d+)(e[+-]?\d+)?$)");
  if (!std::regex_match(t, kNumber)) return std::nullopt;
  double v = std::strtod(t.c_str(), nullptr);
  if (!std::isfinite(v)) return std::nullopt;
  return percent ? v / 100.0 : v;
}

double ExactMatch(std::string_view pred, const std::vector<std::string>& answers) {
  const std::string p = NormalizeText(pred);
  for (const std::string& a : answers) {
    if (NormalizeText(a) == p) return 1.0;
  }
  return 0.0;
}

double VqaScore(std::string_view pred, const std::vector<std::string>& answers) {
  const std::string p = NormalizeText(pred);
  int matches = 0;
  for (const std::string& a : answers) matches += NormalizeText(a) == p ? 1 : 0;
  return std::min(1.0, matches / 3.0);
}

double RelaxedMatch(std::string_view pred,
                    const std::vector<std::string>& answers, double tolerance) {
  const std::optional<double> p = ParseNumber(pred);
  const std::string p_text = NormalizeText(pred);
  for (const std::string& a : answers) {
    const std::optional<double> v = ParseNumber(a);
    if (p && v) {
      const bool ok = *v == 0.0 ? *p == 0.0
                                : std::abs(*p - *v) / std::abs(*v) <= tolerance;
      if (ok) return 1.0;
    } else if (NormalizeText(a) == p_text) {
      return 1.0;
    }
  }
  return 0.0;
}

double SubstringMatch(std::string_view pred,
                      const std::vector<std::string>& answers, bool math) {
  std::string p = NormalizeText(pred);
  if (math) p = StripAllSpace(p);
  for (const std::string& a : answers) {
    std::string n = NormalizeText(a);
    if (math) n = StripAllSpace(n);
    if (p.find(n) != std::string::npos) return 1.0;
  }
  return 0.0;
}

std::optional<char> McqExtract(std::string_view pred, std::string_view labels) {
  for (size_t i = 0; i < pred.size(); ++i) {
    const char c = pred[i];
    if (c < 'A' || c > 'Z') continue;
    if (i > 0 && IsLetterByte(pred[i - 1])) continue;
    if (i + 1 < pred.size() && IsLetterByte(pred[i + 1])) continue;
    if (!labels.empty() && labels.find(c) == std::string_view::npos) continue;
    return c;
  }
  return std::nullopt;
}

std::optional<std::string> YesNoExtract(std::string_view pred) {
  size_t i = 0;
  while (i < pred.size()) {
    while (i < pred.size() && !IsLetterByte(pred[i])) ++i;
    const size_t b = i;
    while (i < pred.size() && IsLetterByte(pred[i])) ++i;
    const std::string word = NormalizeText(pred.substr(b, i - b));
    if (word == "yes" || word == "no") return word;
  }
  return std::nullopt;
}

std::size_t LcsLength(const std::vector<std::string>& a,
                      const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double RougeL(std::string_view pred, const std::vector<std::string>& refs) {
  const std::vector<std::string> p = Tokens(pred);
  double best = 0.0;
  for (const std::string& ref : refs) {
    const std::vector<std::string> r = Tokens(ref);
    if (p.empty() && r.empty()) return 1.0;
    if (p.empty() || r.empty()) continue;
    const double lcs = static_cast<double>(LcsLength(p, r));
    if (lcs == 0.0) continue;
    const double precision = lcs / p.size();
    const double recall = lcs / r.size();
    best = std::max(best, 2 * precision * recall / (precision + recall));
  }
  return best;
}

std::string_view MetricName(Task task) {
  switch (task) {
    case Task::kExact: return "exact_match";
    case Task::kVqa: return "vqa_score";
    case Task::kRelaxed: return "relaxed_match";
    case Task::kSubstring: return "substring_match";
    case Task::kMcq: return "mcq_accuracy";
    case Task::kYesNo: return "yesno_accuracy";
    case Task::kCaption: return "rouge_l";
  }
  return "unknown";
}

MetricResult ScoreRecord(const QuestionRecord& rec, std::string_view pred) {
  switch (rec.task) {
    case Task::kExact:
      return Make(rec, rec.task, pred, ExactMatch(pred, rec.answers));
    case Task::kVqa:
      return Make(rec, rec.task, pred, VqaScore(pred, rec.answers));
    case Task::kRelaxed:
      return Make(rec, rec.task, pred, RelaxedMatch(pred, rec.answers));
    case Task::kSubstring:
      return Make(rec, rec.task, pred, SubstringMatch(pred, rec.answers, rec.math));
    case Task::kCaption:
      return Make(rec, rec.task, pred, RougeL(pred, rec.answers));
    case Task::kYesNo: {
      const auto got = YesNoExtract(pred);
      double score = 0.0;
      for (const std::string& a : rec.answers) {
        if (got && NormalizeText(a) == *got) score = 1.0;
      }
      return Make(rec, rec.task, pred, score);
    }
    case Task::kMcq: {
      std::string labels;
      for (const Choice& c : rec.choices) labels += c.label;
      std::optional<char> got = McqExtract(pred, labels);
      if (!got) {
        const std::string p = NormalizeText(pred);
        for (const Choice& c : rec.choices) {
          if (NormalizeText(c.text) == p) got = c.label[0];
        }
      }
      double score = 0.0;
      for (const std::string& a : rec.answers) {
        if (got && GoldLabel(rec, a) == got) score = 1.0;
      }
      return Make(rec, rec.task, pred, score);
    }
  }
  throw Error(ErrorCode::kUnknownTask, "unknown task");
}

MetricResult ScoreRecord(const QuestionRecord& rec, std::string_view task,
                         std::string_view pred) {
  QuestionRecord copy = rec;
  copy.task = ParseTask(task);
  return ScoreRecord(copy, pred);
}

}  // namespace ttscale
