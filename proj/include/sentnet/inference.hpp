#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sentnet/estimation.hpp"
#include "sentnet/factor_model.hpp"

namespace sentnet {

struct BPConfig {
  int max_iterations = 100;
  double damping = 0.5;     // in [0, 1)
  double tolerance = 1e-6;  // on the pre-damping message residual
  bool parallel = true;     // OpenMP kernel; serial reference when false
};

// Binary pairwise field over user labels: unary log-potentials plus one
// table per undirected support edge. Clamped users carry -inf on the
// non-clamped label.
struct PairwiseField {
  struct Pair {
    int a = 0;
    int b = 0;
    std::array<double, 4> logpot{};  // [ka*2 + kb]
  };
  int n_users = 0;
  std::vector<std::array<double, 2>> unary;
  std::vector<Pair> pairs;
};

// Folds the user-tweet factors into unary potentials and both directed
// user-user contributions of each support edge into one pairwise table.
PairwiseField build_pairwise_field(const Graph& g, const FactorParams& params,
                                   const RevealedLabels& revealed,
                                   std::span<const Label> tweet_labels,
                                   const RevealedLabels& clamped);
// Id-keyed convenience; throws ValidationError for a clamped id not in g.
PairwiseField build_pairwise_field(const Graph& g, const FactorParams& params,
                                   const RevealedLabels& revealed,
                                   std::span<const Label> tweet_labels,
                                   const std::map<std::string, Label>& clamped);

// Total log-potential of a joint assignment; equals log_score up to a
// Y-independent constant.
double field_log_potential(const PairwiseField& field,
                           std::span<const Label> labels);

using Marginals = std::vector<std::array<double, 2>>;  // [p_neg, p_pos]

struct BPResult {
  Marginals marginals;
  bool converged = false;
  int iterations = 0;
  std::vector<double> delta_trace;  // max message residual per iteration
};

// Sum-product with a synchronous flooding schedule and damped updates.
// Non-convergence is reported via `converged`, never thrown.
BPResult loopy_bp(const PairwiseField& field, const BPConfig& config);
BPResult loopy_bp_serial(const PairwiseField& field, const BPConfig& config);

struct BruteForceResult {
  Marginals marginals;
  double log_partition = 0.0;
};

// Exact marginals and log Z by enumerating all 2^n assignments (n <= 20).
BruteForceResult brute_force_marginals(const PairwiseField& field);

void write_bp_diagnostics_csv(const BPResult& result, const std::string& path);

struct PredictConfig {
  int n_repeats = 5;  // must be odd
  bool learn = false;
  // When false, revealed users contribute only their w_labeled-weighted
  // tweet evidence instead of being clamped.
  bool clamp_revealed = true;
  SampleRankConfig sample_rank;  // seed overridden per repeat
  BPConfig bp;
  std::vector<std::uint64_t> repeat_seeds;  // length n_repeats when learning
};

// Learning-then-inference with a per-user majority vote over repeats.
// Revealed users are clamped during BP and keep their revealed labels in the
// output; each unrevealed user gets the argmax marginal (ties Positive).
std::vector<Label> predict(const Graph& g, const RevealedLabels& revealed,
                           std::span<const Label> tweet_labels,
                           const PredictConfig& config,
                           std::vector<BPResult>* bp_diagnostics = nullptr);

}  // namespace sentnet
