#pragma once

#include <cstdint>
#include <string>

#include "sentnet/dataset.hpp"

namespace sentnet {

// Planted-homophily generator configuration. Each ordered user pair draws a
// directed follow edge with p_edge_same or p_edge_diff depending on label
// agreement; mention edges come from an independent pass with their own
// rates. Tweets mix two class-conditional token distributions sharing a
// (1 - vocab_separation) common mass; with probability tweet_noise a tweet
// draws from the wrong class. pool_users extra users are appended with
// hidden labels (written as null) and their own tweet noise.
struct SynthConfig {
  int n_users = 300;
  double class_balance = 0.5;  // positive share
  double p_edge_same = 0.02;
  double p_edge_diff = 0.002;
  double mutual_fraction = 0.2;  // chance a drawn edge gains its reverse
  double p_at_same = 0.005;
  double p_at_diff = 0.0005;
  int tweets_min = 1;
  int tweets_max = 8;
  double tweet_noise = 0.25;
  int vocab_size = 400;
  double vocab_separation = 0.85;
  int pool_users = 0;
  double pool_tweet_noise = 0.5;
  std::string topic_keyword = "aurora";  // embedded in every tweet
  std::uint64_t seed = 1;
};

// Validates the config and materializes a dataset, deterministically in the
// seed. Pool users sort after labeled users by id.
Dataset generate(const SynthConfig& config);

// Expected share of connected (at-least-one-direction) pairs with matching
// labels for the follow graph, given exact class counts.
double expected_same_given_connected(const SynthConfig& config);

// writes users.jsonl, tweets.jsonl, edges.tsv, manifest.json into dir
void write_dataset(const Dataset& data, const SynthConfig& config,
                   const std::string& dir);

std::string manifest_json(const SynthConfig& config);

}  // namespace sentnet
