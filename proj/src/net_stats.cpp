#include "sentnet/net_stats.hpp"

#include <cmath>
#include <cstdio>

namespace sentnet {
namespace {

// (n1, n0) class counts; throws if any user lacks a gold label.
std::pair<long, long> class_counts(const Graph& g) {
  long n1 = 0, n0 = 0;
  for (const auto& u : g.users()) {
    if (!u.gold)
      throw ValidationError("user without gold label in statistics: " + u.id);
    (*u.gold == Label::Positive ? n1 : n0)++;
  }
  return {n1, n0};
}

double pairs2(long n) { return 0.5 * static_cast<double>(n) * (n - 1); }

}  // namespace

ConnectionStats shared_sentiment_stats(const Graph& g) {
  auto [n1, n0] = class_counts(g);
  const long n = n1 + n0;

  ConnectionStats s;
  long same = 0;
  const auto& edges = g.support_edges();
  for (const auto& e : edges)
    if (*g.user(e.a).gold == *g.user(e.b).gold) ++same;
  s.n_edges_used = static_cast<long>(edges.size());
  if (s.n_edges_used > 0)
    s.p_same_given_connected = static_cast<double>(same) / s.n_edges_used;
  if (n >= 2) s.p_same_random = (pairs2(n1) + pairs2(n0)) / pairs2(n);
  return s;
}

LinkStats link_stats(const Graph& g) {
  auto [n1, n0] = class_counts(g);
  const double same_pairs = pairs2(n1) + pairs2(n0);
  const double diff_pairs = static_cast<double>(n1) * n0;
  if (same_pairs <= 0)
    throw ValidationError("no same-label pairs to condition on");
  if (diff_pairs <= 0)
    throw ValidationError("no different-label pairs to condition on");

  long conn_same = 0, conn_diff = 0;
  for (const auto& e : g.support_edges())
    (*g.user(e.a).gold == *g.user(e.b).gold ? conn_same : conn_diff)++;
  return {conn_same / same_pairs, conn_diff / diff_pairs};
}

DegreeStats degree_stats(const Graph& g) {
  DegreeStats s;
  s.n_users = g.n_users();
  if (g.directed()) {
    s.n_edges = g.n_directed_edges();
    if (s.n_users > 0)
      s.avg_degree = static_cast<double>(s.n_edges) / s.n_users;
  } else {
    s.n_edges = static_cast<long>(g.support_edges().size());
    if (s.n_users > 0)
      s.avg_degree = 2.0 * static_cast<double>(s.n_edges) / s.n_users;
  }
  return s;
}

std::string stats_csv_header() {
  return "topic,variant,p_same_connected,p_same_random,p_conn_same,"
         "p_conn_diff,n_edges,avg_degree";
}

std::string stats_csv_row(const std::string& topic, const Graph& g) {
  auto fmt = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  auto conn = shared_sentiment_stats(g);
  auto deg = degree_stats(g);

  std::string p_conn_same, p_conn_diff;  // empty when undefined
  try {
    auto ls = link_stats(g);
    p_conn_same = fmt(ls.p_connected_given_same);
    p_conn_diff = fmt(ls.p_connected_given_diff);
  } catch (const ValidationError&) {
  }

  std::string same = conn.p_same_given_connected
                         ? fmt(*conn.p_same_given_connected)
                         : std::string();
  return topic + "," + to_string(g.variant()) + "," + same + "," +
         fmt(conn.p_same_random) + "," + p_conn_same + "," + p_conn_diff +
         "," + std::to_string(conn.n_edges_used) + "," + fmt(deg.avg_degree);
}

}  // namespace sentnet
