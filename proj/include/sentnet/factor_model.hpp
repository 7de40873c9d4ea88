#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentnet/graph.hpp"
#include "sentnet/types.hpp"

namespace sentnet {

using Mat2 = std::array<std::array<double, 2>, 2>;

// revealed[u] is engaged (holding the disclosed gold label) iff user u is
// part of the training split.
using RevealedLabels = std::vector<std::optional<Label>>;

struct FactorParams {
  Mat2 mu{};      // mu[k][l]: user label k, tweet label l
  Mat2 lambda{};  // lambda[k][l]: user label k, neighbor label l
  double w_labeled = 1.0;
  double w_unlabeled = 0.125;
  double w_relation = 0.6;
};

std::string params_to_json(const FactorParams& p);
FactorParams params_from_json(const std::string& text);

// Full joint assignment: one label per user, one observed label per tweet.
struct Assignment {
  std::vector<Label> user_labels;   // by user index
  std::vector<Label> tweet_labels;  // by global tweet index
};

// Aggregated factor activations; also carries llr gradients, where entries
// may be negative.
struct FeatureCounts {
  Mat2 f{};  // user-tweet mass
  Mat2 h{};  // user-user mass
};

// Single user-tweet factor value: w/|tweets_u| when Y(u)=k and the tweet's
// observed label is l, with w chosen by the user's revealed status; else 0.
double user_tweet_feature(const Graph& g, const FactorParams& params,
                          const RevealedLabels& revealed, int user, int tweet,
                          const Assignment& y, Label k, Label l);

// Single user-user factor value: w_relation/|neighbors(u)| when Y(u)=k and
// Y(v)=l; else 0. Normalization uses the source user's neighbor count.
double user_user_feature(const Graph& g, const FactorParams& params, int u,
                         int v, const Assignment& y, Label k, Label l);

FeatureCounts feature_counts(const Graph& g, const FactorParams& params,
                             const RevealedLabels& revealed,
                             const Assignment& y);
// Serial reference for the OpenMP kernel above.
FeatureCounts feature_counts_serial(const Graph& g, const FactorParams& params,
                                    const RevealedLabels& revealed,
                                    const Assignment& y);

// Unnormalized log-probability: sum_kl mu[k][l]*F[k][l] + lambda[k][l]*H[k][l].
double log_score(const Graph& g, const FactorParams& params,
                 const RevealedLabels& revealed, const Assignment& y);
double log_score(const FactorParams& params, const FeatureCounts& counts);

// log(P(Y_new)/P(Y_old)); the partition function cancels.
double llr(const Graph& g, const FactorParams& params,
           const RevealedLabels& revealed, const Assignment& y_new,
           const Assignment& y_old);

// Gradient of llr with respect to (mu, lambda): feature-count differences.
FeatureCounts llr_gradient(const Graph& g, const FactorParams& params,
                           const RevealedLabels& revealed,
                           const Assignment& y_new, const Assignment& y_old);

// Fast path for the sampler: llr and gradient of flipping a single user's
// label, O(degree + tweets) instead of a full recount. Equal to the general
// routines on the corresponding pair of assignments.
double flip_llr(const Graph& g, const FactorParams& params,
                const RevealedLabels& revealed, const Assignment& y, int user);
FeatureCounts flip_gradient(const Graph& g, const FactorParams& params,
                            const RevealedLabels& revealed,
                            const Assignment& y, int user);

}  // namespace sentnet
