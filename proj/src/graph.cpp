#include "sentnet/graph.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace sentnet {

std::string to_string(GraphVariant v) {
  switch (v) {
    case GraphVariant::DirectedFollow: return "directed-follow";
    case GraphVariant::MutualFollow: return "mutual-follow";
    case GraphVariant::DirectedAt: return "directed-at";
    case GraphVariant::MutualAt: return "mutual-at";
  }
  return "?";
}

GraphVariant variant_from_string(const std::string& s) {
  if (s == "directed-follow") return GraphVariant::DirectedFollow;
  if (s == "mutual-follow") return GraphVariant::MutualFollow;
  if (s == "directed-at") return GraphVariant::DirectedAt;
  if (s == "mutual-at") return GraphVariant::MutualAt;
  throw ValidationError("unknown graph variant: " + s);
}

int Graph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? -1 : it->second;
}

Graph build_graph(std::vector<User> users, std::vector<Tweet> tweets,
                  std::vector<RawEdge> raw_edges, GraphVariant variant) {
  Graph g;
  g.variant_ = variant;

  // Users with no (on-topic) tweets are excluded, along with their edges.
  std::set<std::string> with_tweets;
  for (const auto& t : tweets) with_tweets.insert(t.user);

  for (auto& u : users)
    if (with_tweets.count(u.id)) g.users_.push_back(std::move(u));
  std::sort(g.users_.begin(), g.users_.end(),
            [](const User& a, const User& b) { return a.id < b.id; });
  for (int i = 0; i < static_cast<int>(g.users_.size()); ++i)
    g.index_[g.users_[i].id] = i;

  const int n = g.n_users();

  std::sort(tweets.begin(), tweets.end(), [](const Tweet& a, const Tweet& b) {
    return a.user != b.user ? a.user < b.user : a.id < b.id;
  });
  g.tweet_offsets_.assign(n + 1, 0);
  for (const auto& t : tweets) {
    int u = g.index_of(t.user);
    if (u < 0) continue;  // author filtered out upstream
    g.tweet_authors_.push_back(u);
    g.tweets_.push_back(t);
  }
  for (int a : g.tweet_authors_) g.tweet_offsets_[a + 1]++;
  for (int u = 0; u < n; ++u) g.tweet_offsets_[u + 1] += g.tweet_offsets_[u];

  // Deduplicated directed pairs of the matching edge kind.
  const EdgeKind kind =
      uses_follow_edges(variant) ? EdgeKind::Follow : EdgeKind::Mention;
  std::set<std::pair<int, int>> directed;
  for (const auto& e : raw_edges) {
    if (e.kind != kind) continue;
    int s = g.index_of(e.src), d = g.index_of(e.dst);
    if (s < 0 || d < 0 || s == d) continue;
    directed.insert({s, d});
  }

  std::map<std::pair<int, int>, SupportEdge> support;  // key a < b
  for (auto [s, d] : directed) {
    auto key = std::minmax(s, d);
    auto& se = support[{key.first, key.second}];
    se.a = key.first;
    se.b = key.second;
    (s == se.a ? se.ab : se.ba) = true;
  }

  std::vector<std::vector<int>> adj(n), radj(n);
  if (is_directed(variant)) {
    for (auto [s, d] : directed) {
      adj[s].push_back(d);
      radj[d].push_back(s);
    }
  } else {
    for (auto it = support.begin(); it != support.end();) {
      if (it->second.ab && it->second.ba) {
        adj[it->second.a].push_back(it->second.b);
        adj[it->second.b].push_back(it->second.a);
        ++it;
      } else {
        it = support.erase(it);  // mutuality unmet
      }
    }
    radj = adj;
  }

  g.adj_offsets_.assign(n + 1, 0);
  g.radj_offsets_.assign(n + 1, 0);
  for (int u = 0; u < n; ++u) {
    std::sort(adj[u].begin(), adj[u].end());
    std::sort(radj[u].begin(), radj[u].end());
    g.adj_offsets_[u + 1] = g.adj_offsets_[u] + static_cast<int>(adj[u].size());
    g.radj_offsets_[u + 1] =
        g.radj_offsets_[u] + static_cast<int>(radj[u].size());
    g.adj_.insert(g.adj_.end(), adj[u].begin(), adj[u].end());
    g.radj_.insert(g.radj_.end(), radj[u].begin(), radj[u].end());
  }

  g.support_.reserve(support.size());
  for (const auto& [key, se] : support) g.support_.push_back(se);

  return g;
}

std::vector<std::string> neighbors(const Graph& g,
                                   const std::string& user_id) {
  int u = g.index_of(user_id);
  if (u < 0) throw ValidationError("unknown user id: " + user_id);
  std::vector<std::string> out;
  for (int v : g.neighbors(u)) out.push_back(g.user(v).id);
  return out;  // index order is id order
}

std::vector<Tweet> filter_on_topic(const std::vector<Tweet>& tweets,
                                   const std::string& topic_keyword) {
  if (topic_keyword.empty())
    throw ValidationError("topic keyword must be non-empty");
  std::string needle = topic_keyword;
  for (auto& c : needle) c = static_cast<char>(std::tolower(
      static_cast<unsigned char>(c)));
  std::vector<Tweet> kept;
  for (const auto& t : tweets) {
    std::string hay = t.text;
    for (auto& c : hay)
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (hay.find(needle) != std::string::npos) kept.push_back(t);
  }
  return kept;
}

}  // namespace sentnet
