#include "sentnet/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sentnet {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, long line,
                       const std::string& what) {
  throw ValidationError(path + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  return in;
}

bool skippable(const std::string& line) {
  return line.empty() || line[0] == '#';
}

}  // namespace

Dataset load_dataset(const std::string& users_path,
                     const std::string& tweets_path,
                     const std::string& edges_path) {
  Dataset d;
  std::set<std::string> user_ids, tweet_ids;

  {
    auto in = open_or_throw(users_path);
    std::string line;
    long n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (skippable(line)) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        fail(users_path, n, "malformed JSON object");
      if (!j.contains("id") || !j["id"].is_string())
        fail(users_path, n, "missing string field \"id\"");
      User u;
      u.id = j["id"].get<std::string>();
      if (u.id.empty()) fail(users_path, n, "empty user id");
      if (!user_ids.insert(u.id).second)
        fail(users_path, n, "duplicate user id: " + u.id);
      if (!j.contains("label") || j["label"].is_null()) {
        u.gold = std::nullopt;
      } else if (j["label"] == "pos") {
        u.gold = Label::Positive;
      } else if (j["label"] == "neg") {
        u.gold = Label::Negative;
      } else {
        fail(users_path, n, "label must be \"pos\", \"neg\" or null");
      }
      d.users.push_back(std::move(u));
    }
  }

  {
    auto in = open_or_throw(tweets_path);
    std::string line;
    long n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (skippable(line)) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        fail(tweets_path, n, "malformed JSON object");
      for (const char* field : {"id", "user", "text"})
        if (!j.contains(field) || !j[field].is_string())
          fail(tweets_path, n,
               std::string("missing string field \"") + field + "\"");
      Tweet t{j["id"].get<std::string>(), j["user"].get<std::string>(),
              j["text"].get<std::string>()};
      if (t.id.empty()) fail(tweets_path, n, "empty tweet id");
      if (t.text.empty()) fail(tweets_path, n, "empty tweet text");
      if (!tweet_ids.insert(t.id).second)
        fail(tweets_path, n, "duplicate tweet id: " + t.id);
      if (!user_ids.count(t.user))
        fail(tweets_path, n, "tweet references unknown user: " + t.user);
      d.tweets.push_back(std::move(t));
    }
  }

  {
    auto in = open_or_throw(edges_path);
    std::string line;
    long n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (skippable(line)) continue;
      std::istringstream ss(line);
      std::string src, dst, kind;
      if (!std::getline(ss, src, '\t') || !std::getline(ss, dst, '\t') ||
          !std::getline(ss, kind, '\t'))
        fail(edges_path, n, "expected src<TAB>dst<TAB>kind");
      RawEdge e;
      e.src = src;
      e.dst = dst;
      if (kind == "follow") e.kind = EdgeKind::Follow;
      else if (kind == "mention") e.kind = EdgeKind::Mention;
      else fail(edges_path, n, "kind must be \"follow\" or \"mention\"");
      if (e.src == e.dst)
        fail(edges_path, n, "self-loop edge on user: " + e.src);
      if (!user_ids.count(e.src))
        fail(edges_path, n, "edge references unknown user: " + e.src);
      if (!user_ids.count(e.dst))
        fail(edges_path, n, "edge references unknown user: " + e.dst);
      d.edges.push_back(std::move(e));
    }
  }

  return d;
}

void save_users(const std::vector<User>& users, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  for (const auto& u : users) {
    json j;
    j["id"] = u.id;
    if (u.gold)
      j["label"] = *u.gold == Label::Positive ? "pos" : "neg";
    else
      j["label"] = nullptr;
    out << j.dump() << '\n';
  }
}

void save_tweets(const std::vector<Tweet>& tweets, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  for (const auto& t : tweets) {
    json j;
    j["id"] = t.id;
    j["user"] = t.user;
    j["text"] = t.text;
    out << j.dump() << '\n';
  }
}

void save_edges(const std::vector<RawEdge>& edges, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  for (const auto& e : edges)
    out << e.src << '\t' << e.dst << '\t'
        << (e.kind == EdgeKind::Follow ? "follow" : "mention") << '\n';
}

}  // namespace sentnet
