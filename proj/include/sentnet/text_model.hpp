#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sentnet/graph.hpp"
#include "sentnet/types.hpp"

namespace sentnet {

// Sparse term-frequency vector over hashed unigram/bigram features, sorted
// by feature id with colliding ids merged.
struct TokenVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
};

inline constexpr std::uint32_t kFeatureBuckets = 1u << 20;

// Lowercases, splits on non-alphanumeric bytes (keeping a leading '#' or '@'
// attached to the following token), and emits unigrams plus adjacent
// bigrams. Bytes >= 0x80 are treated as token characters.
TokenVector tokenize(const std::string& text);
std::vector<std::string> tokenize_terms(const std::string& text);

struct LinearModel {
  std::vector<std::pair<std::uint32_t, double>> weights;  // sorted by id
  double bias = 0.0;

  double dot(const TokenVector& x) const;
};

struct TweetPrediction {
  std::string tweet_id;
  Label label = Label::Positive;
  double margin = 0.0;
};

// Hinge-loss linear classifier trained by stochastic subgradient descent
// with L2 regularization; learning rate 0.1 / (1 + epoch), examples shuffled
// per epoch. Deterministic given the seed. Throws ValidationError when the
// training set lacks one of the classes.
LinearModel train_classifier(
    const std::vector<std::pair<TokenVector, Label>>& examples, int epochs,
    double reg, std::uint64_t seed);

// margin = <w, x> + bias; Positive iff margin >= 0.
TweetPrediction predict_tweet(const LinearModel& m, const TokenVector& x,
                              const std::string& tweet_id = {});
Label predict_label(const LinearModel& m, const std::string& text);

// Majority label among the user's tweets as predicted by the model; ties
// resolve Positive. Throws ValidationError for a user with no tweets.
Label svm_vote(const Graph& g, const LinearModel& m, int user);
Label svm_vote(const Graph& g, const LinearModel& m,
               const std::string& user_id);

// Versioned JSON serialization of (bias, sparse weights).
std::string model_to_json(const LinearModel& m);
LinearModel model_from_json(const std::string& text);
void save_model(const LinearModel& m, const std::string& path);
LinearModel load_model(const std::string& path);

}  // namespace sentnet
