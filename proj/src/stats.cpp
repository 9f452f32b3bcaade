// Copyright 2026 The robeval Authors. All rights reserved.
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

#include "robeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "robeval/error.hpp"
#include "robeval/seed.hpp"

namespace robeval {
namespace {

// Linear interpolation between order statistics (Hyndman-Fan type 7).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

void BootstrapConfig::validate() const {
  if (replicates < 1) throw Error(ErrorCode::kInvalidArgument, "bootstrap replicates must be positive");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("bootstrap confidence {} is outside (0, 1)", confidence));
  }
}

IntervalEstimate bootstrap_ci(std::span<const std::optional<double>> scores,
                              const BootstrapConfig& config) {
  config.validate();
  std::vector<double> defined;
  defined.reserve(scores.size());
  for (const auto& s : scores)
    if (s) defined.push_back(*s);

  IntervalEstimate est;
  est.n_used = defined.size();
  est.n_undefined = scores.size() - defined.size();
  if (defined.empty()) {
    throw Error(ErrorCode::kUndefined, "bootstrap: every group-level score is undefined");
  }
  est.mean = mean_of(defined);
  if (defined.size() == 1) {
    est.lo = est.hi = est.mean;
    est.degenerate = true;
    return est;
  }

  const std::size_t n = defined.size();
  std::vector<double> replicate_means(config.replicates);
  for (std::size_t b = 0; b < config.replicates; ++b) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(b)));
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += defined[uniform_index(rng, n)];
    replicate_means[b] = sum / static_cast<double>(n);
  }
  std::sort(replicate_means.begin(), replicate_means.end());

  const double alpha = 1.0 - config.confidence;
  est.lo = quantile_sorted(replicate_means, alpha / 2.0);
  est.hi = quantile_sorted(replicate_means, 1.0 - alpha / 2.0);
  est.lo = std::min(est.lo, est.mean);
  est.hi = std::max(est.hi, est.mean);
  return est;
}

IntervalEstimate bootstrap_ci(std::span<const double> scores, const BootstrapConfig& config) {
  std::vector<std::optional<double>> wrapped(scores.begin(), scores.end());
  return bootstrap_ci(std::span<const std::optional<double>>(wrapped), config);
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("pearson_r: length mismatch ({} vs {})", xs.size(), ys.size()));
  }
  if (xs.size() < 2) throw Error(ErrorCode::kInvalidArgument, "pearson_r needs at least 2 points");
  const double mx = mean_of(xs);
  const double my = mean_of(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::kInvalidArgument, "pearson_r: constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

bool significant(const IntervalEstimate& interval) { return interval.lo > 0.0 || interval.hi < 0.0; }

}  // namespace robeval
