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

#include "ttscale/textaug.h"

#include <array>
#include <cctype>
#include <cmath>
#include <set>

#include "ttscale/constrained.h"
#include "ttscale/random.h"
#include "ttscale/serialization.h"

namespace ttscale {
namespace {

constexpr std::string_view kParaphraseTemplate =
    "You are an expert paraphraser.\n"
    "\n"
    "Your task is to paraphrase input text without changing its meaning. Keep "
    "the details and core content. Generate {n_aug} paraphrased versions.\n"
    "\n"
    "Return your output as a JSON object with the key \"paraphrases\", mapped "
    "to a list of {n_aug} unique paraphrased versions.\n"
    "\n"
    "Now, paraphrase the following text:";

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool IsAsciiAlnum(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::isalnum(u) != 0;
}

// Keys with their horizontal offset in key widths.
struct KeyRow {
  std::string_view keys;
  double offset;
};
constexpr std::array<KeyRow, 4> kRows{{{"1234567890", 0.0},
                                       {"qwertyuiop", 0.5},
                                       {"asdfghjkl", 0.75},
                                       {"zxcvbnm", 1.25}}};

std::array<std::string, 128> BuildNeighborTable() {
  std::array<std::string, 128> table;
  for (size_t r = 0; r < kRows.size(); ++r) {
    for (size_t i = 0; i < kRows[r].keys.size(); ++i) {
      const double x = static_cast<double>(i) + kRows[r].offset;
      std::string& out = table[static_cast<unsigned char>(kRows[r].keys[i])];
      for (size_t r2 = 0; r2 < kRows.size(); ++r2) {
        const int dr = static_cast<int>(r2) - static_cast<int>(r);
        if (dr < -1 || dr > 1) continue;
        for (size_t j = 0; j < kRows[r2].keys.size(); ++j) {
          const double dx = std::abs(static_cast<double>(j) + kRows[r2].offset - x);
          const bool same_row_adjacent = dr == 0 && dx == 1.0;
          const bool cross_row_adjacent = dr != 0 && dx < 1.0;
          if (same_row_adjacent || cross_row_adjacent) out += kRows[r2].keys[j];
        }
      }
    }
  }
  return table;
}

const std::array<std::string, 128>& NeighborTable() {
  static const std::array<std::string, 128> table = BuildNeighborTable();
  return table;
}

// Byte ranges of whitespace-delimited words.
struct Span {
  size_t begin;
  size_t end;
};

std::vector<Span> Words(std::string_view text) {
  std::vector<Span> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    if (i == text.size()) break;
    const size_t b = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    words.push_back({b, i});
  }
  return words;
}

bool IsContinuationByte(char c) {
  return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

// Byte offsets of code point starts inside [b, e), excluding b.
std::vector<size_t> InteriorBoundaries(std::string_view text, Span w) {
  std::vector<size_t> cuts;
  for (size_t i = w.begin + 1; i < w.end; ++i) {
    if (!IsContinuationByte(text[i])) cuts.push_back(i);
  }
  return cuts;
}

// Sentence spans in order; gaps between them are separators.
std::vector<Span> SentenceSpans(std::string_view text) {
  std::vector<Span> spans;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    if (i == text.size()) break;
    const size_t b = i;
    size_t e = text.size();
    for (size_t k = i; k < text.size(); ++k) {
      const char c = text[k];
      if ((c == '.' || c == '!' || c == '?') && k + 1 < text.size() &&
          IsSpace(text[k + 1])) {
        e = k + 1;
        break;
      }
    }
    size_t trimmed = e;
    while (trimmed > b && IsSpace(text[trimmed - 1])) --trimmed;
    spans.push_back({b, trimmed});
    i = e;
  }
  return spans;
}

std::string Join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string ReplaceAll(std::string s, std::string_view from,
                       std::string_view to) {
  for (size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

}  // namespace

std::string_view KeyboardNeighbors(char c) {
  const auto u = static_cast<unsigned char>(c);
  if (u >= 128) return {};
  return NeighborTable()[u];
}

std::string KeyboardError(std::string_view text, double rate,
                          std::uint64_t seed) {
  if (rate < 0.0 || rate > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "rate must be in [0, 1]");
  }
  SeededRng rng(seed);
  std::string out(text);
  for (char& c : out) {
    if (!IsAsciiAlnum(c)) continue;
    if (!rng.Bernoulli(rate)) continue;
    const bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
    const std::string_view nbrs =
        KeyboardNeighbors(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (nbrs.empty()) continue;
    char r = nbrs[rng.Index(nbrs.size())];
    if (upper) r = static_cast<char>(std::toupper(static_cast<unsigned char>(r)));
    c = r;
  }
  return out;
}

std::string WordSplit(std::string_view text, std::uint64_t seed) {
  std::vector<std::vector<size_t>> cuts;
  for (const Span& w : Words(text)) {
    auto interior = InteriorBoundaries(text, w);
    if (interior.size() + 1 >= 4) cuts.push_back(std::move(interior));
  }
  if (cuts.empty()) return std::string(text);
  SeededRng rng(seed);
  const auto& chosen = cuts[rng.Index(cuts.size())];
  const size_t at = chosen[rng.Index(chosen.size())];
  std::string out(text.substr(0, at));
  out += ' ';
  out += text.substr(at);
  return out;
}

std::string WordDelete(std::string_view text, std::uint64_t seed) {
  const std::vector<Span> words = Words(text);
  if (words.size() < 3) return std::string(text);
  SeededRng rng(seed);
  const size_t k = rng.Index(words.size());
  size_t b = words[k].begin;
  size_t e = words[k].end;
  if (k + 1 < words.size()) {
    e = words[k + 1].begin;
  } else {
    b = words[k - 1].end;
  }
  std::string out(text.substr(0, b));
  out += text.substr(e);
  return out;
}

std::string SentenceReorder(std::string_view text, std::uint64_t seed) {
  const std::vector<Span> spans = SentenceSpans(text);
  if (spans.size() < 2) return std::string(text);
  SeededRng rng(seed);
  const size_t k = rng.Index(spans.size() - 1);
  const Span a = spans[k];
  const Span b = spans[k + 1];
  std::string out(text.substr(0, a.begin));
  out += text.substr(b.begin, b.end - b.begin);
  out += text.substr(a.end, b.begin - a.end);
  out += text.substr(a.begin, a.end - a.begin);
  out += text.substr(b.end);
  return out;
}

std::vector<std::string> SplitSentences(std::string_view text) {
  std::vector<std::string> out;
  for (const Span& s : SentenceSpans(text)) {
    out.emplace_back(text.substr(s.begin, s.end - s.begin));
  }
  return out;
}

std::vector<ClassicalPlanStep> PlanClassicalPipeline(
    std::uint64_t seed, const ClassicalTextOptions& options) {
  std::vector<TextOp> order{TextOp::kKeyboardError, TextOp::kWordSplit,
                            TextOp::kWordDelete, TextOp::kSentenceReorder};
  SeededRng rng(seed);
  rng.Shuffle(order);
  std::vector<ClassicalPlanStep> plan;
  for (TextOp op : order) {
    const bool included = rng.Bernoulli(options.inclusion_prob);
    plan.push_back({op, included, MixSeed(seed, static_cast<std::uint64_t>(op) + 1)});
  }
  return plan;
}

std::string ClassicalTextPipeline(std::string_view text, std::uint64_t seed,
                                  const ClassicalTextOptions& options) {
  std::string out(text);
  for (const ClassicalPlanStep& step : PlanClassicalPipeline(seed, options)) {
    if (!step.included) continue;
    switch (step.op) {
      case TextOp::kKeyboardError:
        out = KeyboardError(out, options.keyboard_rate, step.seed);
        break;
      case TextOp::kWordSplit:
        out = WordSplit(out, step.seed);
        break;
      case TextOp::kWordDelete:
        out = WordDelete(out, step.seed);
        break;
      case TextOp::kSentenceReorder:
        out = SentenceReorder(out, step.seed);
        break;
    }
  }
  return out;
}

std::string EnforceConsistency(std::string_view augmented,
                               std::string_view original) {
  std::string out(augmented);
  out += " In other words, ";
  out += original;
  return out;
}

std::string RenderParaphrasePrompt(std::string_view text, int n_aug) {
  std::string out =
      ReplaceAll(std::string(kParaphraseTemplate), "{n_aug}", std::to_string(n_aug));
  out += '\n';
  out += text;
  return out;
}

std::optional<std::vector<std::string>> ParseParaphrases(std::string_view raw,
                                                         int n) {
  Json j = Json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object() || j.size() != 1 ||
      !j.contains("paraphrases") || !j["paraphrases"].is_array() ||
      static_cast<int>(j["paraphrases"].size()) != n) {
    return std::nullopt;
  }
  std::vector<std::string> out;
  for (const Json& item : j["paraphrases"]) {
    if (!item.is_string() || item.get<std::string>().empty()) return std::nullopt;
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::string GeneratorParaphraser::Complete(const std::string& prompt, int n,
                                           int attempt) {
  const TokenConstraint constraint(ParaphraseJsonAutomaton(n), g_.vocabulary());
  ConstrainedOptions options;
  options.max_tokens = max_tokens_;
  options.temperature = attempt == 0 ? 0.0 : 1.0;
  options.seed = MixSeed(seed_, static_cast<std::uint64_t>(attempt));
  AugmentedInput input;
  input.prompt = prompt;
  try {
    return ConstrainedDecode(g_, input, constraint, options).text;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kConstraintUnsatisfiable) throw;
    return std::string();  // counts as a failed attempt
  }
}

std::vector<std::string> SelfParaphrase(Paraphraser& paraphraser,
                                        std::string_view prompt, int n_aug,
                                        std::uint64_t seed) {
  if (n_aug < 1) throw Error(ErrorCode::kInvalidArgument, "n_aug must be >= 1");
  std::vector<std::string> sentences = SplitSentences(prompt);
  if (sentences.empty()) sentences.emplace_back(prompt);

  std::vector<std::vector<std::string>> sets;
  for (const std::string& sentence : sentences) {
    std::optional<std::vector<std::string>> parsed;
    for (int attempt = 0; attempt < kParaphraseAttempts && !parsed; ++attempt) {
      parsed = ParseParaphrases(
          paraphraser.Complete(RenderParaphrasePrompt(sentence, n_aug), n_aug,
                               attempt),
          n_aug);
    }
    if (!parsed) {
      throw Error(ErrorCode::kParaphraserSchemaViolation,
                  "no valid paraphrase list after " +
                      std::to_string(kParaphraseAttempts) + " attempts");
    }
    sets.push_back(std::move(*parsed));
  }

  // Product size, saturated at n_aug + 1 (only "<= n_aug or not" matters).
  const size_t n = static_cast<size_t>(n_aug);
  size_t product = 1;
  for (const auto& s : sets) product = std::min(product * s.size(), n + 1);

  SeededRng rng(seed);
  auto random_tuple = [&] {
    std::vector<size_t> t;
    for (const auto& s : sets) t.push_back(rng.Index(s.size()));
    return t;
  };
  std::vector<std::vector<size_t>> tuples;
  if (product <= n) {
    std::vector<size_t> t(sets.size(), 0);
    for (size_t k = 0; k < product; ++k) {
      tuples.push_back(t);
      for (size_t d = sets.size(); d-- > 0;) {
        if (++t[d] < sets[d].size()) break;
        t[d] = 0;
      }
    }
    while (tuples.size() < n) tuples.push_back(random_tuple());
  } else {
    std::set<std::vector<size_t>> seen;
    while (seen.size() < n) seen.insert(random_tuple());
    tuples.assign(seen.begin(), seen.end());
  }

  std::vector<std::string> out;
  for (const auto& t : tuples) {
    std::vector<std::string> parts;
    for (size_t d = 0; d < t.size(); ++d) parts.push_back(sets[d][t[d]]);
    out.push_back(Join(parts, " "));
  }
  return out;
}

std::vector<std::string> SelfParaphrase(Generator& g, std::string_view prompt,
                                        int n_aug, std::uint64_t seed) {
  GeneratorParaphraser paraphraser(g, MixSeed(seed, 0x9a7a));
  return SelfParaphrase(paraphraser, prompt, n_aug, seed);
}

}  // namespace ttscale
