#include "sentnet/synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"
#include "sentnet/rng.hpp"

namespace sentnet {
namespace {

void validate(const SynthConfig& c) {
  auto bad = [](const std::string& what) {
    throw ValidationError("synth config: " + what);
  };
  if (c.n_users < 2) bad("n_users must be >= 2");
  if (!(c.class_balance > 0.0 && c.class_balance < 1.0))
    bad("class_balance must lie in (0, 1)");
  for (double p : {c.p_edge_same, c.p_edge_diff, c.p_at_same, c.p_at_diff,
                   c.mutual_fraction, c.tweet_noise, c.pool_tweet_noise})
    if (!(p >= 0.0 && p <= 1.0)) bad("probabilities must lie in [0, 1]");
  if (c.tweets_min < 1) bad("tweets_min must be >= 1");
  if (c.tweets_max < c.tweets_min) bad("tweets_max must be >= tweets_min");
  if (c.vocab_size < 2) bad("vocab_size must be >= 2");
  if (!(c.vocab_separation >= 0.0 && c.vocab_separation <= 1.0))
    bad("vocab_separation must lie in [0, 1]");
  if (c.pool_users < 0) bad("pool_users must be >= 0");
  if (c.topic_keyword.empty()) bad("topic_keyword must be non-empty");
  for (unsigned char ch : c.topic_keyword)
    if (!std::isalnum(ch)) bad("topic_keyword must be alphanumeric");
}

std::string padded(const std::string& prefix, long value, int width) {
  std::string digits = std::to_string(value);
  return prefix + std::string(width > static_cast<int>(digits.size())
                                  ? width - digits.size()
                                  : 0,
                              '0') +
         digits;
}

std::vector<Label> draw_labels(int count, double balance, Rng& rng) {
  const int n_pos = static_cast<int>(std::lround(count * balance));
  std::vector<Label> labels(count, Label::Negative);
  for (int i = 0; i < n_pos && i < count; ++i) labels[i] = Label::Positive;
  rng.shuffle(labels);
  return labels;
}

void draw_edges(const std::vector<Label>& labels, double p_same, double p_diff,
                double mutual_fraction, EdgeKind kind,
                const std::vector<std::string>& ids, Rng& rng,
                std::vector<RawEdge>& out) {
  const int n = static_cast<int>(labels.size());
  std::set<std::pair<int, int>> drawn;
  std::vector<std::pair<int, int>> order;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (rng.bernoulli(labels[i] == labels[j] ? p_same : p_diff)) {
        drawn.insert({i, j});
        order.emplace_back(i, j);
      }
    }
  for (auto [i, j] : order)
    if (rng.bernoulli(mutual_fraction)) drawn.insert({j, i});
  for (auto [i, j] : drawn)
    out.push_back({ids[i], ids[j], kind});
}

}  // namespace

Dataset generate(const SynthConfig& config) {
  validate(config);
  Rng rng(config.seed);

  const int total = config.n_users + config.pool_users;
  const int width =
      static_cast<int>(std::to_string(total > 0 ? total - 1 : 0).size());

  std::vector<std::string> ids(total);
  for (int i = 0; i < total; ++i) ids[i] = padded("u", i, width);

  auto base_labels = draw_labels(config.n_users, config.class_balance, rng);
  auto pool_labels = draw_labels(config.pool_users, config.class_balance, rng);
  std::vector<Label> labels = base_labels;
  labels.insert(labels.end(), pool_labels.begin(), pool_labels.end());

  Dataset d;
  for (int i = 0; i < total; ++i) {
    User u;
    u.id = ids[i];
    if (i < config.n_users) u.gold = labels[i];  // pool labels stay hidden
    d.users.push_back(std::move(u));
  }

  draw_edges(labels, config.p_edge_same, config.p_edge_diff,
             config.mutual_fraction, EdgeKind::Follow, ids, rng, d.edges);
  draw_edges(labels, config.p_at_same, config.p_at_diff,
             config.mutual_fraction, EdgeKind::Mention, ids, rng, d.edges);

  // Class-conditional token distributions: a shared pool carries
  // (1 - separation) of the mass, the rest comes from per-class pools.
  const int n_common =
      static_cast<int>(std::lround(config.vocab_size *
                                   (1.0 - config.vocab_separation)));
  const int n_class = std::max(1, (config.vocab_size - n_common) / 2);
  auto token = [&](int idx) { return padded("w", idx, 4); };
  auto draw_token = [&](Label cls) {
    if (n_common > 0 && !rng.bernoulli(config.vocab_separation))
      return token(rng.next_int(n_common));
    const int base =
        n_common + (cls == Label::Positive ? n_class : 0);
    return token(base + rng.next_int(n_class));
  };

  long tweet_counter = 0;
  for (int i = 0; i < total; ++i) {
    const double noise =
        i < config.n_users ? config.tweet_noise : config.pool_tweet_noise;
    const int n_tweets =
        config.tweets_min +
        rng.next_int(config.tweets_max - config.tweets_min + 1);
    for (int t = 0; t < n_tweets; ++t) {
      const Label cls = rng.bernoulli(noise) ? opposite(labels[i]) : labels[i];
      const int len = 4 + rng.next_int(9);
      std::string text = config.topic_keyword;
      for (int w = 0; w < len; ++w) text += " " + draw_token(cls);
      d.tweets.push_back({padded("t", tweet_counter++, 8), ids[i], text});
    }
  }
  return d;
}

double expected_same_given_connected(const SynthConfig& config) {
  const long n1 = std::lround(config.n_users * config.class_balance);
  const long n0 = config.n_users - n1;
  const double same_pairs = 0.5 * (n1 * (n1 - 1.0) + n0 * (n0 - 1.0));
  const double diff_pairs = static_cast<double>(n1) * n0;
  auto pair_conn = [](double p) { return 1.0 - (1.0 - p) * (1.0 - p); };
  const double s = pair_conn(config.p_edge_same) * same_pairs;
  const double o = pair_conn(config.p_edge_diff) * diff_pairs;
  return s / (s + o);
}

std::string manifest_json(const SynthConfig& c) {
  nlohmann::json j;
  j["format"] = "sentnet-synth-manifest";
  j["version"] = 1;
  j["n_users"] = c.n_users;
  j["class_balance"] = c.class_balance;
  j["p_edge_same"] = c.p_edge_same;
  j["p_edge_diff"] = c.p_edge_diff;
  j["mutual_fraction"] = c.mutual_fraction;
  j["p_at_same"] = c.p_at_same;
  j["p_at_diff"] = c.p_at_diff;
  j["tweets_min"] = c.tweets_min;
  j["tweets_max"] = c.tweets_max;
  j["tweet_noise"] = c.tweet_noise;
  j["vocab_size"] = c.vocab_size;
  j["vocab_separation"] = c.vocab_separation;
  j["pool_users"] = c.pool_users;
  j["pool_tweet_noise"] = c.pool_tweet_noise;
  j["topic_keyword"] = c.topic_keyword;
  j["seed"] = c.seed;
  return j.dump(2);
}

void write_dataset(const Dataset& data, const SynthConfig& config,
                   const std::string& dir) {
  std::filesystem::create_directories(dir);
  save_users(data.users, dir + "/users.jsonl");
  save_tweets(data.tweets, dir + "/tweets.jsonl");
  save_edges(data.edges, dir + "/edges.tsv");
  std::ofstream out(dir + "/manifest.json");
  if (!out) throw ValidationError("cannot write manifest in " + dir);
  out << manifest_json(config) << '\n';
}

}  // namespace sentnet
