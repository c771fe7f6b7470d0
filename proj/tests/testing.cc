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

#include "testing.h"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>

#include <unistd.h>

#include "ttscale/image.h"
#include "ttscale/run.h"
#include "ttscale/serialization.h"

namespace ttscale::testing {

std::vector<double> RandomDistribution(std::mt19937_64& rng, int vocab,
                                       double sparsity) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(static_cast<size_t>(vocab));
  double sum = 0.0;
  for (double& x : p) {
    x = u(rng) < sparsity ? 0.0 : -std::log(1.0 - u(rng));
    sum += x;
  }
  if (sum == 0.0) {
    p[std::uniform_int_distribution<size_t>(0, p.size() - 1)(rng)] = 1.0;
    return p;
  }
  for (double& x : p) x /= sum;
  return p;
}

StepMatrix RandomStepMatrix(std::mt19937_64& rng, int n, int vocab) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < n; ++i) rows.push_back(RandomDistribution(rng, vocab, 0.1));
  return StepMatrix::FromRows(rows);
}

std::vector<std::vector<double>> Rows(const StepMatrix& m) {
  std::vector<std::vector<double>> out;
  for (const auto& r : m.rows()) out.push_back(r.vector());
  return out;
}

std::vector<double> OracleAverage(const std::vector<std::vector<double>>& rows) {
  std::vector<double> out(rows[0].size(), 0.0);
  for (const auto& r : rows) {
    for (size_t v = 0; v < r.size(); ++v) out[v] += r[v];
  }
  for (double& x : out) x /= static_cast<double>(rows.size());
  return out;
}

std::vector<double> OracleEntropyWeighted(
    const std::vector<std::vector<double>>& rows) {
  std::vector<double> w;
  double z = 0.0;
  for (const auto& r : rows) {
    double h = 0.0;
    for (double p : r) {
      if (p > 0) h -= p * std::log(p);
    }
    w.push_back(std::exp(-h));
    z += w.back();
  }
  std::vector<double> out(rows[0].size(), 0.0);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t v = 0; v < out.size(); ++v) out[v] += w[i] / z * rows[i][v];
  }
  return out;
}

namespace {

int FirstMax(const std::vector<double>& x) {
  int best = 0;
  for (size_t i = 1; i < x.size(); ++i) {
    if (x[i] > x[static_cast<size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace

int OracleMajority(const std::vector<std::vector<double>>& rows) {
  std::vector<double> votes(rows[0].size(), 0.0);
  for (const auto& r : rows) votes[static_cast<size_t>(FirstMax(r))] += 1;
  return FirstMax(votes);
}

int OracleMostConfident(const std::vector<std::vector<double>>& rows) {
  double best = -1;
  int token = 0;
  // Row-major scan; a later cell only wins when strictly larger, or equal
  // with a lower token index.
  for (const auto& r : rows) {
    for (size_t v = 0; v < r.size(); ++v) {
      if (r[v] > best || (r[v] == best && static_cast<int>(v) < token)) {
        best = r[v];
        token = static_cast<int>(v);
      }
    }
  }
  return token;
}

TokenSequence ExhaustiveGreedy(const ToyModel& model,
                               const std::vector<AugmentedInput>& inputs,
                               Aggregation rule, int max_tokens) {
  const int vocab = model.vocab_size();
  const TokenId eos = model.vocabulary().eos();
  const auto pick = [&](const TokenSequence& prefix) {
    std::vector<std::vector<double>> rows;
    for (const AugmentedInput& in : inputs) rows.push_back(model.Evaluate(in, prefix).vector());
    switch (rule) {
      case Aggregation::kAverage: return FirstMax(OracleAverage(rows));
      case Aggregation::kEntropyWeighted: return FirstMax(OracleEntropyWeighted(rows));
      case Aggregation::kMajority: return OracleMajority(rows);
      case Aggregation::kMostConfident: return OracleMostConfident(rows);
    }
    return -1;
  };

  std::vector<TokenSequence> greedy;
  TokenSequence seq;
  // Depth-first over all sequences; each complete one is checked from
  // scratch rather than pruned, so the check does not share the decoder's
  // incremental structure.
  std::function<void()> visit = [&] {
    const bool complete = !seq.empty() && (seq.back() == eos ||
                                           static_cast<int>(seq.size()) == max_tokens);
    if (complete) {
      bool ok = true;
      for (size_t j = 0; j < seq.size() && ok; ++j) {
        ok = pick(TokenSequence(seq.begin(), seq.begin() + static_cast<long>(j))) == seq[j];
      }
      if (ok) greedy.push_back(seq);
      return;
    }
    for (TokenId t = 0; t < vocab; ++t) {
      seq.push_back(t);
      visit();
      seq.pop_back();
    }
  };
  visit();
  if (greedy.size() != 1) {
    throw std::logic_error("expected one greedy sequence, found " +
                           std::to_string(greedy.size()));
  }
  return greedy.front();
}

AugmentedInput TextInput(const std::string& prompt, int variant) {
  AugmentedInput in;
  in.prompt = prompt;
  in.origin_id = "t";
  in.variant_index = variant;
  return in;
}

ToyModelSpec RandomTreeSpec(std::uint64_t seed, int vocab, int n_inputs,
                            int depth) {
  std::mt19937_64 rng(seed);
  ToyModelSpec spec;
  spec.vocab.push_back("<eos>");
  for (int v = 1; v < vocab; ++v) spec.vocab.push_back("t" + std::to_string(v));
  spec.layer_seed = seed;
  std::vector<TokenSequence> frontier{{}};
  for (int d = 0; d < depth; ++d) {
    std::vector<TokenSequence> next;
    for (const TokenSequence& prefix : frontier) {
      for (int i = 0; i < n_inputs; ++i) {
        spec.Set("fixture " + std::to_string(i), std::nullopt, prefix,
                 RandomDistribution(rng, vocab, 0.2));
      }
      for (TokenId t = 1; t < vocab; ++t) {
        TokenSequence longer = prefix;
        longer.push_back(t);
        next.push_back(std::move(longer));
      }
    }
    frontier.swap(next);
  }
  return spec;
}

std::vector<AugmentedInput> TreeInputs(int n_inputs) {
  std::vector<AugmentedInput> out;
  for (int i = 0; i < n_inputs; ++i) out.push_back(TextInput("fixture " + std::to_string(i), i));
  return out;
}

namespace {

const std::vector<std::string> kColors{"red", "blue", "green", "yellow"};

std::vector<double> Row(TokenId favored, double p_favored, TokenId other,
                        double p_other, int vocab) {
  std::vector<double> row(static_cast<size_t>(vocab),
                          (1.0 - p_favored - p_other) / (vocab - 2));
  row[static_cast<size_t>(favored)] = p_favored;
  row[static_cast<size_t>(other)] = p_other;
  return row;
}

Image RecordImage(int k) {
  Image img(16, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      img.at(y, x, 0) = static_cast<std::uint8_t>(16 * k + x);
      img.at(y, x, 1) = static_cast<std::uint8_t>(8 * y);
      img.at(y, x, 2) = static_cast<std::uint8_t>(255 - 10 * k);
    }
  }
  return img;
}

}  // namespace

E2eFixture WriteE2eFixture(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  ToyModelSpec spec;
  spec.vocab.push_back("<eos>");
  for (const std::string& c : kColors) spec.vocab.push_back(c);
  spec.layer_seed = 99;
  const int vocab = static_cast<int>(spec.vocab.size());

  GenerationConfig gen;
  gen.n_aug = 4;
  gen.seed = kE2eSeed;

  std::ofstream data(dir / "e2e.jsonl");
  for (int k = 0; k < kE2eRecords; ++k) {
    QuestionRecord rec;
    rec.id = "q" + std::string(k < 10 ? "0" : "") + std::to_string(k);
    rec.prompt = "Question " + std::to_string(k) +
                 ": which colour dominates the picture? Answer in one word.";
    rec.task = Task::kExact;
    const TokenId correct = 1 + k % 4;
    const TokenId wrong = 1 + (k + 1) % 4;
    rec.answers = {kColors[static_cast<size_t>(correct - 1)]};
    if (k % 2 == 0) {
      const std::string name = rec.id + ".png";
      SavePng(RecordImage(k), dir / name);
      rec.image_path = name;
    }

    const AugmentedInput original = OriginalInput(rec, dir);
    const std::vector<AugmentedInput> variants = BuildAugmentedInputs(
        original, gen, DeriveQuestionSeed(kE2eSeed, rec.id));
    const auto set = [&](const AugmentedInput& in, std::vector<double> row) {
      spec.Set(in.prompt, in.image, {}, std::move(row));
    };
    if (k < kE2eBothRight) {
      set(original, Row(correct, 0.7, wrong, 0.2, vocab));
      for (const auto& v : variants) set(v, Row(correct, 0.6, wrong, 0.3, vocab));
    } else if (k < kE2eBothRight + kE2eFlips) {
      // The unaugmented input leans wrong, as does one variant; the other
      // variants outvote it once averaged.
      set(original, Row(wrong, 0.55, correct, 0.35, vocab));
      set(variants[0], Row(wrong, 0.6, correct, 0.3, vocab));
      for (size_t i = 1; i < variants.size(); ++i) {
        set(variants[i], Row(correct, 0.85, wrong, 0.05, vocab));
      }
    } else {
      set(original, Row(wrong, 0.6, correct, 0.3, vocab));
      for (const auto& v : variants) set(v, Row(wrong, 0.6, correct, 0.3, vocab));
    }
    data << Json(rec).dump() << '\n';
  }
  std::ofstream model(dir / "e2e_model.json");
  model << Json(spec).dump() << '\n';
  return {dir / "e2e.jsonl", dir / "e2e_model.json"};
}

RunConfig E2eConfig(const E2eFixture& fx, Method method,
                    const std::filesystem::path& output_dir) {
  RunConfig cfg;
  cfg.method = method;
  cfg.generation.n_aug = 4;
  cfg.generation.seed = kE2eSeed;
  cfg.generation.max_tokens = 4;
  cfg.dataset_path = fx.dataset;
  cfg.model = {ModelRef::Kind::kToy, fx.model.string()};
  cfg.output_dir = output_dir;
  cfg.adapt = AdaptConfig{};
  cfg.weight_opt = WeightOptConfig{};
  return cfg;
}

std::filesystem::path TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("ttscale_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ttscale::testing
