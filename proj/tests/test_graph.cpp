#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "doctest.h"
#include "sentnet/dataset.hpp"
#include "sentnet/graph.hpp"
#include "sentnet/synth.hpp"
#include "test_util.hpp"

using namespace sentnet;
using namespace sentnet::testutil;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("sentnet_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static inline int counter = 0;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("load_dataset round-trips a well-formed fixture") {
  TempDir dir;
  write_file(dir.file("users.jsonl"),
             "# comment line\n"
             "{\"id\":\"u1\",\"label\":\"pos\"}\n"
             "{\"id\":\"u2\",\"label\":\"neg\"}\n"
             "{\"id\":\"u3\",\"label\":null}\n");
  write_file(dir.file("tweets.jsonl"),
             "{\"id\":\"t1\",\"user\":\"u1\",\"text\":\"hello world\"}\n"
             "{\"id\":\"t2\",\"user\":\"u2\",\"text\":\"obama rocks\"}\n"
             "{\"id\":\"t3\",\"user\":\"u3\",\"text\":\"ok\"}\n");
  write_file(dir.file("edges.tsv"), "u1\tu2\tfollow\nu2\tu3\tmention\n");

  Dataset d = load_dataset(dir.file("users.jsonl"), dir.file("tweets.jsonl"),
                           dir.file("edges.tsv"));
  REQUIRE(d.users.size() == 3);
  REQUIRE(d.tweets.size() == 3);
  REQUIRE(d.edges.size() == 2);
  CHECK(d.users[0].gold == Label::Positive);
  CHECK(!d.users[2].gold.has_value());
  CHECK(d.edges[1].kind == EdgeKind::Mention);
}

TEST_CASE("load_dataset rejects a tweet referencing an unknown user") {
  TempDir dir;
  write_file(dir.file("users.jsonl"), "{\"id\":\"u1\",\"label\":\"pos\"}\n");
  write_file(dir.file("tweets.jsonl"),
             "{\"id\":\"t1\",\"user\":\"u9\",\"text\":\"hi\"}\n");
  write_file(dir.file("edges.tsv"), "");
  CHECK_THROWS_WITH_AS(
      load_dataset(dir.file("users.jsonl"), dir.file("tweets.jsonl"),
                   dir.file("edges.tsv")),
      doctest::Contains("u9"), ValidationError);
}

TEST_CASE("load_dataset accepts an empty edges file") {
  TempDir dir;
  write_file(dir.file("users.jsonl"), "{\"id\":\"u1\",\"label\":\"pos\"}\n");
  write_file(dir.file("tweets.jsonl"),
             "{\"id\":\"t1\",\"user\":\"u1\",\"text\":\"hi\"}\n");
  write_file(dir.file("edges.tsv"), "");
  Dataset d = load_dataset(dir.file("users.jsonl"), dir.file("tweets.jsonl"),
                           dir.file("edges.tsv"));
  CHECK(d.edges.empty());
}

TEST_CASE("load_dataset reports duplicate ids and self-loops with lines") {
  TempDir dir;
  write_file(dir.file("users.jsonl"),
             "{\"id\":\"u1\",\"label\":\"pos\"}\n"
             "{\"id\":\"u1\",\"label\":\"neg\"}\n");
  write_file(dir.file("tweets.jsonl"), "");
  write_file(dir.file("edges.tsv"), "");
  CHECK_THROWS_WITH_AS(
      load_dataset(dir.file("users.jsonl"), dir.file("tweets.jsonl"),
                   dir.file("edges.tsv")),
      doctest::Contains(":2"), ValidationError);

  write_file(dir.file("users.jsonl"), "{\"id\":\"u1\",\"label\":\"pos\"}\n");
  write_file(dir.file("edges.tsv"), "u1\tu1\tfollow\n");
  CHECK_THROWS_AS(load_dataset(dir.file("users.jsonl"),
                               dir.file("tweets.jsonl"),
                               dir.file("edges.tsv")),
                  ValidationError);
}

TEST_CASE("build_graph mutual variant keeps only reciprocated pairs") {
  TinySpec spec{"111", {{0, 1}, {1, 0}, {0, 2}}, {}};
  Graph g = tiny_graph(spec, GraphVariant::MutualFollow);
  REQUIRE(g.support_edges().size() == 1);
  CHECK(g.support_edges()[0].a == 0);
  CHECK(g.support_edges()[0].b == 1);
  CHECK(g.neighbors(0).size() == 1);
  CHECK(g.neighbors(2).empty());
}

TEST_CASE("build_graph directed variant keeps edges as given") {
  TinySpec spec{"111", {{0, 1}, {1, 0}, {0, 2}}, {}};
  Graph g = tiny_graph(spec, GraphVariant::DirectedFollow);
  CHECK(g.n_directed_edges() == 3);
  CHECK(g.neighbors(0).size() == 2);
  CHECK(g.neighbors(1).size() == 1);
  CHECK(g.neighbors(2).empty());
  CHECK(g.support_edges().size() == 2);
}

TEST_CASE("build_graph mention edges feed only At variants") {
  std::vector<User> users{mk_user("a", Label::Positive),
                          mk_user("b", Label::Positive)};
  std::vector<Tweet> tweets{mk_tweet("t1", "a"), mk_tweet("t2", "b")};
  std::vector<RawEdge> edges{mention("a", "b")};
  Graph at = build_graph(users, tweets, edges, GraphVariant::MutualAt);
  CHECK(at.support_edges().empty());  // mutuality unmet
  Graph dir_at = build_graph(users, tweets, edges, GraphVariant::DirectedAt);
  CHECK(dir_at.n_directed_edges() == 1);
  Graph fol = build_graph(users, tweets, edges, GraphVariant::DirectedFollow);
  CHECK(fol.n_directed_edges() == 0);
}

TEST_CASE("neighbors returns out-neighbors / adjacency, sorted by id") {
  TinySpec spec{"111", {{0, 1}, {2, 0}}, {}};
  Graph g = tiny_graph(spec, GraphVariant::DirectedFollow);
  CHECK(neighbors(g, "u0") == std::vector<std::string>{"u1"});
  CHECK(neighbors(g, "u1") == std::vector<std::string>{});
  CHECK(neighbors(g, "u2") == std::vector<std::string>{"u0"});
  CHECK_THROWS_AS(neighbors(g, "nobody"), ValidationError);

  TinySpec mspec{"11", {{0, 1}, {1, 0}}, {}};
  Graph m = tiny_graph(mspec, GraphVariant::MutualFollow);
  CHECK(neighbors(m, "u1") == std::vector<std::string>{"u0"});
}

TEST_CASE("build_graph drops tweetless users together with their edges") {
  std::vector<User> users{mk_user("a", Label::Positive),
                          mk_user("b", Label::Negative),
                          mk_user("c", Label::Positive)};
  std::vector<Tweet> tweets{mk_tweet("t1", "a"), mk_tweet("t2", "c")};
  std::vector<RawEdge> edges{follow("a", "b"), follow("b", "a"),
                             follow("a", "c")};
  Graph g = build_graph(users, tweets, edges, GraphVariant::DirectedFollow);
  CHECK(g.n_users() == 2);
  CHECK(g.index_of("b") == -1);
  CHECK(g.n_directed_edges() == 1);
  for (const auto& se : g.support_edges()) {
    CHECK(g.user(se.a).id != "b");
    CHECK(g.user(se.b).id != "b");
  }
}

TEST_CASE("duplicate raw edges are deduplicated silently") {
  TinySpec spec{"11", {{0, 1}, {0, 1}, {0, 1}}, {}};
  Graph g = tiny_graph(spec, GraphVariant::DirectedFollow);
  CHECK(g.n_directed_edges() == 1);
}

TEST_CASE("filter_on_topic is a case-insensitive substring match") {
  std::vector<Tweet> tweets{mk_tweet("t1", "a", "Obama rocks"),
                            mk_tweet("t2", "a", "Barack is great"),
                            mk_tweet("t3", "a", "OBAMA!")};
  auto kept = filter_on_topic(tweets, "obama");
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].id == "t1");
  CHECK(kept[1].id == "t3");
  CHECK(filter_on_topic({}, "obama").empty());
  CHECK_THROWS_AS(filter_on_topic(tweets, ""), ValidationError);
}

TEST_CASE("mutual edges are exactly the reciprocated directed pairs") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + rng.next_int(6);
    TinySpec spec;
    spec.labels.assign(n, '1');
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && rng.bernoulli(0.4)) spec.edges.emplace_back(i, j);
    Graph dir = tiny_graph(spec, GraphVariant::DirectedFollow);
    Graph mut = tiny_graph(spec, GraphVariant::MutualFollow);

    for (const auto& se : mut.support_edges()) {
      CHECK(se.ab);
      CHECK(se.ba);
    }
    long reciprocated = 0;
    for (const auto& se : dir.support_edges())
      if (se.ab && se.ba) ++reciprocated;
    CHECK(static_cast<long>(mut.support_edges().size()) == reciprocated);

    // adjacency and support edges tell the same story
    for (int u = 0; u < dir.n_users(); ++u)
      for (int v : dir.neighbors(u)) {
        bool found = false;
        for (const auto& se : dir.support_edges())
          found |= (se.a == std::min(u, v) && se.b == std::max(u, v) &&
                    (u < v ? se.ab : se.ba));
        CHECK(found);
      }
  }
}

TEST_CASE("load_dataset after save is the identity on valid datasets") {
  SynthConfig cfg;
  cfg.n_users = 40;
  cfg.pool_users = 5;
  cfg.seed = 11;
  Dataset d = generate(cfg);

  TempDir dir;
  save_users(d.users, dir.file("users.jsonl"));
  save_tweets(d.tweets, dir.file("tweets.jsonl"));
  save_edges(d.edges, dir.file("edges.tsv"));
  Dataset r = load_dataset(dir.file("users.jsonl"), dir.file("tweets.jsonl"),
                           dir.file("edges.tsv"));

  REQUIRE(r.users.size() == d.users.size());
  REQUIRE(r.tweets.size() == d.tweets.size());
  REQUIRE(r.edges.size() == d.edges.size());
  for (std::size_t i = 0; i < d.users.size(); ++i) {
    CHECK(r.users[i].id == d.users[i].id);
    CHECK(r.users[i].gold == d.users[i].gold);
  }
  for (std::size_t i = 0; i < d.tweets.size(); ++i) {
    CHECK(r.tweets[i].id == d.tweets[i].id);
    CHECK(r.tweets[i].user == d.tweets[i].user);
    CHECK(r.tweets[i].text == d.tweets[i].text);
  }
  for (std::size_t i = 0; i < d.edges.size(); ++i) {
    CHECK(r.edges[i].src == d.edges[i].src);
    CHECK(r.edges[i].dst == d.edges[i].dst);
    CHECK(r.edges[i].kind == d.edges[i].kind);
  }
}
