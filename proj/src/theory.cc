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

#include "ttscale/theory.h"

#include <cmath>
#include <future>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ttscale/core.h"
#include "ttscale/random.h"

namespace ttscale {
namespace {

void Require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t count = 0;

  void Add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  void Merge(const Moments& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  MonteCarloEstimate Estimate() const {
    MonteCarloEstimate e;
    e.trials = count;
    if (count == 0) return e;
    e.mean = sum / count;
    const double var =
        count > 1 ? std::max(0.0, (sum_sq - count * e.mean * e.mean) / (count - 1))
                  : 0.0;
    e.std_error = std::sqrt(var / count);
    return e;
  }
};

// Runs `shard_fn(trials_in_shard, shard_seed)` over `shards` threads.
template <typename Fn>
MonteCarloEstimate Sharded(std::int64_t trials, std::uint64_t seed, int shards,
                           Fn shard_fn) {
  Require(trials > 0, "trials must be positive");
  shards = std::max(1, shards);
  std::vector<std::future<Moments>> parts;
  for (int s = 0; s < shards; ++s) {
    const std::int64_t share =
        trials / shards + (s < trials % shards ? 1 : 0);
    const std::uint64_t shard_seed = MixSeed(seed, static_cast<std::uint64_t>(s));
    parts.push_back(std::async(shards == 1 ? std::launch::deferred : std::launch::async,
                               [=] { return shard_fn(share, shard_seed); }));
  }
  Moments total;
  for (auto& p : parts) total.Merge(p.get());
  return total.Estimate();
}

double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double phi(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// 1 - (1 - x)^n without cancellation for small x.
double AnyOf(double x, int n) { return -std::expm1(n * std::log1p(-x)); }

}  // namespace

double KN(int n) {
  Require(n >= 1, "n must be >= 1");
  if (n == 1) return 0.0;
  const auto integrand = [n](double z) {
    return n * z * phi(z) * std::pow(Phi(z), n - 1);
  };
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -10.0, 10.0, 15, 1e-12, &error);
}

void SelectionModel::Validate() const {
  Require(sigma_q > 0.0 && sigma_s > 0.0, "sigmas must be positive");
  Require(std::abs(rho) <= 1.0, "|rho| must be <= 1");
  Require(n >= 1, "n must be >= 1");
}

double ExpectedSelectedQuality(const SelectionModel& model) {
  model.Validate();
  if (model.rho == 0.0) return model.mu_q;
  return model.mu_q + model.rho * model.sigma_q * KN(model.n);
}

void ChainParams::Validate() const {
  Require(!p.empty(), "chain needs T >= 1");
  Require(p.size() == s_token.size(), "p and s_token lengths differ");
  for (double v : p) Require(v > 0.0 && v < 1.0, "p_t must be in (0, 1)");
  for (double v : s_token) Require(v > 0.0 && v <= 1.0, "s_t must be in (0, 1]");
  Require(s_answer > 0.0 && s_answer <= 1.0, "s_answer must be in (0, 1]");
  Require(n >= 1, "n must be >= 1");
  Require(delta >= 0.0, "delta must be >= 0");
}

double PToken(const ChainParams& cp) {
  cp.Validate();
  double out = 1.0;
  for (size_t t = 0; t < cp.p.size(); ++t) {
    out *= cp.s_token[t] * AnyOf(cp.p[t], cp.n);
  }
  return out;
}

double PAnswer(const ChainParams& cp) {
  cp.Validate();
  double prod = 1.0;
  for (double v : cp.p) prod *= v;
  return cp.s_answer * AnyOf(prod, cp.n);
}

double FeasibleSelectorAccuracy(double p, int n, double delta) {
  Require(p > 0.0 && p < 1.0, "p must be in (0, 1)");
  Require(n >= 1, "n must be >= 1");
  Require(delta >= 0.0, "delta must be >= 0");
  const double bound = (1.0 + delta) * p / AnyOf(p, n);
  if (bound > 1.0 + 1e-12) {
    throw Error(ErrorCode::kInfeasible,
                "required selector accuracy " + std::to_string(bound) + " > 1");
  }
  return std::min(bound, 1.0);
}

int TheoremCheck(double p, double delta, int n, double s_answer, int t_max) {
  const double q = (1.0 + delta) * p;
  Require(p > 0.0 && p < 1.0, "p must be in (0, 1)");
  Require(q <= 1.0, "(1 + delta) p must be <= 1");
  Require(n >= 1 && t_max >= 1, "n and t_max must be >= 1");
  Require(s_answer > 0.0 && s_answer <= 1.0, "s_answer must be in (0, 1]");
  for (int t = 1; t <= t_max; ++t) {
    const double token = std::pow(q, t);
    const double answer = s_answer * AnyOf(std::pow(p, t), n);
    // Relative margin keeps rounding noise from reporting equal chains.
    if (token > answer * (1.0 + 1e-12)) return t;
  }
  throw Error(ErrorCode::kNotFound,
              "no crossover up to T = " + std::to_string(t_max));
}

MonteCarloEstimate MonteCarloKN(int n, std::int64_t trials, std::uint64_t seed,
                                int shards) {
  Require(n >= 1, "n must be >= 1");
  return Sharded(trials, seed, shards, [n](std::int64_t count, std::uint64_t s) {
    std::mt19937_64 engine(s);
    std::normal_distribution<double> normal;
    Moments m;
    for (std::int64_t i = 0; i < count; ++i) {
      double best = -INFINITY;
      for (int k = 0; k < n; ++k) best = std::max(best, normal(engine));
      m.Add(best);
    }
    return m;
  });
}

MonteCarloEstimate MonteCarloSelectedQuality(const SelectionModel& model,
                                             std::int64_t trials,
                                             std::uint64_t seed, int shards) {
  model.Validate();
  const double mix = std::sqrt(std::max(0.0, 1.0 - model.rho * model.rho));
  return Sharded(trials, seed, shards, [&model, mix](std::int64_t count,
                                                     std::uint64_t s) {
    std::mt19937_64 engine(s);
    std::normal_distribution<double> normal;
    Moments m;
    for (std::int64_t i = 0; i < count; ++i) {
      double best_score = -INFINITY;
      double chosen_quality = 0.0;
      for (int k = 0; k < model.n; ++k) {
        const double z1 = normal(engine);
        const double z2 = normal(engine);
        const double score = model.mu_s + model.sigma_s * z1;
        if (score > best_score) {
          best_score = score;
          chosen_quality =
              model.mu_q + model.sigma_q * (model.rho * z1 + mix * z2);
        }
      }
      m.Add(chosen_quality);
    }
    return m;
  });
}

MonteCarloEstimate SimulateTokenChain(const ChainParams& cp,
                                      std::int64_t trials, std::uint64_t seed) {
  cp.Validate();
  return Sharded(trials, seed, 1, [&cp](std::int64_t count, std::uint64_t s) {
    std::mt19937_64 engine(s);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Moments m;
    for (std::int64_t i = 0; i < count; ++i) {
      bool ok = true;
      for (size_t t = 0; t < cp.p.size() && ok; ++t) {
        bool any = false;
        for (int k = 0; k < cp.n; ++k) any |= u(engine) < cp.p[t];
        ok = any && u(engine) < cp.s_token[t];
      }
      m.Add(ok ? 1.0 : 0.0);
    }
    return m;
  });
}

MonteCarloEstimate SimulateAnswerChain(const ChainParams& cp,
                                       std::int64_t trials, std::uint64_t seed) {
  cp.Validate();
  return Sharded(trials, seed, 1, [&cp](std::int64_t count, std::uint64_t s) {
    std::mt19937_64 engine(s);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Moments m;
    for (std::int64_t i = 0; i < count; ++i) {
      bool any = false;
      for (int k = 0; k < cp.n; ++k) {
        bool all = true;
        for (double pt : cp.p) all &= u(engine) < pt;
        any |= all;
      }
      m.Add(any && u(engine) < cp.s_answer ? 1.0 : 0.0);
    }
    return m;
  });
}

void WriteKnCsv(std::ostream& out, const std::vector<int>& ns) {
  out << "n,k_n\n" << std::setprecision(12);
  for (int n : ns) out << n << ',' << KN(n) << '\n';
}

void WriteChainCsv(std::ostream& out, double p, double delta, int n,
                   double s_answer, int t_max) {
  const double q = (1.0 + delta) * p;
  Require(q <= 1.0, "(1 + delta) p must be <= 1");
  out << "T,p_token,p_answer\n" << std::setprecision(12);
  for (int t = 1; t <= t_max; ++t) {
    out << t << ',' << std::pow(q, t) << ','
        << s_answer * (1.0 - std::pow(1.0 - std::pow(p, t), n)) << '\n';
  }
}

}  // namespace ttscale
