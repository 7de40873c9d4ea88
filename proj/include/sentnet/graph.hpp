#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentnet/types.hpp"

namespace sentnet {

// Undirected support of a user-user edge; a < b. For directed variants the
// flags record which of the two directions exist; for mutual variants both
// are always set.
struct SupportEdge {
  int a = 0;
  int b = 0;
  bool ab = false;
  bool ba = false;
};

// Topic-specific graph of users, their on-topic tweets, and user-user edges
// under one of the four connection variants. Immutable once built; users and
// adjacency lists are sorted by user id, tweets by (author, tweet id).
class Graph {
 public:
  GraphVariant variant() const { return variant_; }
  bool directed() const { return is_directed(variant_); }

  int n_users() const { return static_cast<int>(users_.size()); }
  int n_tweets() const { return static_cast<int>(tweets_.size()); }
  const std::vector<User>& users() const { return users_; }
  const User& user(int u) const { return users_[u]; }

  // -1 if the id is unknown.
  int index_of(std::string_view id) const;

  std::span<const Tweet> tweets_of(int u) const {
    return {tweets_.data() + tweet_offsets_[u],
            tweets_.data() + tweet_offsets_[u + 1]};
  }
  const Tweet& tweet(int t) const { return tweets_[t]; }
  int tweet_offset(int u) const { return tweet_offsets_[u]; }
  int author_of(int t) const { return tweet_authors_[t]; }

  // Out-neighbors for directed variants, full adjacency for mutual ones.
  // Index order equals sorted-by-id order.
  std::span<const int> neighbors(int u) const {
    return {adj_.data() + adj_offsets_[u], adj_.data() + adj_offsets_[u + 1]};
  }
  // Users that list u among their neighbors.
  std::span<const int> in_neighbors(int u) const {
    return {radj_.data() + radj_offsets_[u],
            radj_.data() + radj_offsets_[u + 1]};
  }

  const std::vector<SupportEdge>& support_edges() const { return support_; }
  long n_directed_edges() const { return static_cast<long>(adj_.size()); }

 private:
  friend Graph build_graph(std::vector<User> users, std::vector<Tweet> tweets,
                           std::vector<RawEdge> raw_edges,
                           GraphVariant variant);

  GraphVariant variant_ = GraphVariant::DirectedFollow;
  std::vector<User> users_;
  std::unordered_map<std::string, int> index_;
  std::vector<Tweet> tweets_;
  std::vector<int> tweet_offsets_;  // n_users + 1
  std::vector<int> tweet_authors_;  // per global tweet index
  std::vector<int> adj_, adj_offsets_;
  std::vector<int> radj_, radj_offsets_;
  std::vector<SupportEdge> support_;
};

// Builds the variant-level graph. Users without tweets are dropped together
// with their incident edges; duplicate raw edges are deduplicated; mutual
// variants keep {i,j} only when both directions exist.
Graph build_graph(std::vector<User> users, std::vector<Tweet> tweets,
                  std::vector<RawEdge> raw_edges, GraphVariant variant);

// Neighbor ids of the given user, sorted by id. Throws ValidationError for
// an unknown id.
std::vector<std::string> neighbors(const Graph& g, const std::string& user_id);

// Keeps tweets whose text contains the keyword (case-insensitive substring).
std::vector<Tweet> filter_on_topic(const std::vector<Tweet>& tweets,
                                   const std::string& topic_keyword);

}  // namespace sentnet
