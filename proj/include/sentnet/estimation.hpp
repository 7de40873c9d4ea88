#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sentnet/factor_model.hpp"
#include "sentnet/rng.hpp"

namespace sentnet {

struct PerfScore {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double combined() const { return accuracy + macro_f1; }
};

enum class UpdateRule { PaperLiteral, SignCorrected };

struct SampleRankConfig {
  int steps = 20000;
  double eta = 0.001;
  int convergence_window = 2000;  // stop after this many update-free steps
  std::uint64_t seed = 0;
  UpdateRule update_rule = UpdateRule::SignCorrected;
};

// Count-based estimate: lambda rows are label co-occurrence frequencies over
// edges whose endpoints are both revealed; mu is the identity; weights keep
// their defaults. Rows with no counts fall back to (0.5, 0.5) and append a
// warning.
FactorParams no_learning_estimate(const Graph& g,
                                  const RevealedLabels& revealed,
                                  std::vector<std::string>* warnings = nullptr);

// Accuracy plus macro-averaged F1 of `predicted` against `gold`, restricted
// to `scope`. A class absent from both gold and predictions contributes
// F1 = 0. Throws ValidationError on empty scope or missing gold labels.
PerfScore perf(std::span<const Label> predicted,
               std::span<const std::optional<Label>> gold,
               std::span<const int> scope);

// Copy of y with one uniformly chosen user's label flipped.
Assignment sample_step(const Assignment& y, Rng& rng);

struct SampleRankTrace {
  int steps_run = 0;
  int n_updates = 0;
  std::vector<double> accepted_perf;  // perf after each accepted transition
};

// Rank-based parameter learning: repeatedly samples a single-flip neighbor,
// updates (mu, lambda) whenever the model's ranking disagrees with the
// labeled-data performance ranking, and accepts the sample iff performance
// improved. Y starts from an independent fair coin per user.
std::pair<FactorParams, Assignment> sample_rank(
    const Graph& g, const RevealedLabels& revealed,
    std::span<const Label> tweet_labels, const SampleRankConfig& config,
    const FactorParams& init_params, SampleRankTrace* trace = nullptr);

}  // namespace sentnet
