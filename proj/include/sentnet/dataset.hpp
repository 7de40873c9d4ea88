#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "sentnet/types.hpp"

namespace sentnet {

struct Dataset {
  std::vector<User> users;
  std::vector<Tweet> tweets;
  std::vector<RawEdge> edges;
};

// Loads and validates a dataset:
//   users file:  JSON lines {"id": string, "label": "pos"|"neg"|null}
//   tweets file: JSON lines {"id": string, "user": string, "text": string}
//   edges file:  TSV src<TAB>dst<TAB>kind, kind in {follow, mention}
// Lines beginning with '#' and blank lines are ignored. Throws
// ValidationError with file/line context on malformed input, duplicate ids,
// or references to unknown users.
Dataset load_dataset(const std::string& users_path,
                     const std::string& tweets_path,
                     const std::string& edges_path);

void save_users(const std::vector<User>& users, const std::string& path);
void save_tweets(const std::vector<Tweet>& tweets, const std::string& path);
void save_edges(const std::vector<RawEdge>& edges, const std::string& path);

}  // namespace sentnet
