#pragma once

#include <optional>
#include <string>

#include "sentnet/graph.hpp"

namespace sentnet {

struct ConnectionStats {
  // Share of connected user pairs with matching gold labels. Absent when the
  // graph has no edges.
  std::optional<double> p_same_given_connected;
  // Closed-form probability that a uniformly random unordered pair matches:
  // [C(n1,2) + C(n0,2)] / C(n,2).
  double p_same_random = 0.0;
  long n_edges_used = 0;  // connected unordered pairs
};

struct LinkStats {
  double p_connected_given_same = 0.0;
  double p_connected_given_diff = 0.0;
};

struct DegreeStats {
  double avg_degree = 0.0;  // out-degree for directed variants
  long n_users = 0;
  long n_edges = 0;  // directed edge count / undirected edge count
};

// Both statistics condition on unordered pairs; for directed variants a pair
// counts as connected when at least one direction exists. All users must
// carry gold labels.
ConnectionStats shared_sentiment_stats(const Graph& g);
LinkStats link_stats(const Graph& g);
DegreeStats degree_stats(const Graph& g);

// One CSV row per variant over the same dataset:
// topic,variant,p_same_connected,p_same_random,p_conn_same,p_conn_diff,n_edges,avg_degree
std::string stats_csv_header();
std::string stats_csv_row(const std::string& topic, const Graph& g);

}  // namespace sentnet
