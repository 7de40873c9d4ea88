#include "sentnet/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sentnet {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// One directed message slot per support-edge direction. Messages live in
// normalized probability space; all reads in an iteration see the previous
// iteration's values, so the kernel is bitwise identical however the slots
// are scheduled across threads.
struct MessageGraph {
  // slot 2*e is a->b of pair e, slot 2*e+1 is b->a
  std::vector<std::array<double, 2>> msg;
  std::vector<int> in_slots;  // slots arriving at each user
  std::vector<int> in_offsets;

  explicit MessageGraph(const PairwiseField& field) {
    msg.assign(2 * field.pairs.size(), {0.5, 0.5});
    std::vector<std::vector<int>> incoming(field.n_users);
    for (int e = 0; e < static_cast<int>(field.pairs.size()); ++e) {
      incoming[field.pairs[e].b].push_back(2 * e);
      incoming[field.pairs[e].a].push_back(2 * e + 1);
    }
    in_offsets.assign(field.n_users + 1, 0);
    for (int u = 0; u < field.n_users; ++u) {
      in_offsets[u + 1] = in_offsets[u] + static_cast<int>(incoming[u].size());
      in_slots.insert(in_slots.end(), incoming[u].begin(), incoming[u].end());
    }
  }
};

// Pre-damping update of one directed message, reading `old_msg`.
inline std::array<double, 2> compute_message(const PairwiseField& field,
                                             const MessageGraph& mg,
                                             const std::vector<std::array<double, 2>>& old_msg,
                                             int e, bool a_to_b) {
  const auto& pr = field.pairs[e];
  const int src = a_to_b ? pr.a : pr.b;
  const int self_slot = a_to_b ? 2 * e + 1 : 2 * e;  // message src receives from dst

  std::array<double, 2> log_in;
  for (int k = 0; k < 2; ++k) {
    double s = field.unary[src][k];
    for (int i = mg.in_offsets[src]; i < mg.in_offsets[src + 1]; ++i) {
      const int slot = mg.in_slots[i];
      if (slot == self_slot) continue;
      s += std::log(old_msg[slot][k]);
    }
    log_in[k] = s;
  }
  const double shift = std::max(log_in[0], log_in[1]);

  std::array<double, 2> out{0.0, 0.0};
  for (int kd = 0; kd < 2; ++kd) {
    double s = 0.0;
    for (int ks = 0; ks < 2; ++ks) {
      const double lp = a_to_b ? pr.logpot[ks * 2 + kd] : pr.logpot[kd * 2 + ks];
      const double term = log_in[ks] + lp - shift;
      s += term == kNegInf ? 0.0 : std::exp(term);
    }
    out[kd] = s;
  }
  const double z = out[0] + out[1];
  out[0] /= z;
  out[1] /= z;
  return out;
}

inline std::array<double, 2> belief_of(const PairwiseField& field,
                                       const MessageGraph& mg, int u) {
  std::array<double, 2> logb;
  for (int k = 0; k < 2; ++k) {
    double s = field.unary[u][k];
    for (int i = mg.in_offsets[u]; i < mg.in_offsets[u + 1]; ++i)
      s += std::log(mg.msg[mg.in_slots[i]][k]);
    logb[k] = s;
  }
  const double shift = std::max(logb[0], logb[1]);
  double p0 = logb[0] == kNegInf ? 0.0 : std::exp(logb[0] - shift);
  double p1 = logb[1] == kNegInf ? 0.0 : std::exp(logb[1] - shift);
  const double z = p0 + p1;
  return {p0 / z, p1 / z};
}

void check_config(const BPConfig& config) {
  if (config.max_iterations < 1)
    throw ValidationError("loopy_bp: max_iterations must be >= 1");
  if (config.tolerance <= 0.0)
    throw ValidationError("loopy_bp: tolerance must be positive");
  if (config.damping < 0.0 || config.damping >= 1.0)
    throw ValidationError("loopy_bp: damping must lie in [0, 1)");
}

inline std::array<double, 2> damped(const std::array<double, 2>& fresh,
                                    const std::array<double, 2>& old,
                                    double damping) {
  return {(1.0 - damping) * fresh[0] + damping * old[0],
          (1.0 - damping) * fresh[1] + damping * old[1]};
}

inline double residual(const std::array<double, 2>& fresh,
                       const std::array<double, 2>& old) {
  return std::max(std::abs(fresh[0] - old[0]), std::abs(fresh[1] - old[1]));
}

}  // namespace

PairwiseField build_pairwise_field(const Graph& g, const FactorParams& params,
                                   const RevealedLabels& revealed,
                                   std::span<const Label> tweet_labels,
                                   const RevealedLabels& clamped) {
  if (static_cast<int>(tweet_labels.size()) != g.n_tweets())
    throw ValidationError("tweet labels must cover every tweet");

  PairwiseField field;
  field.n_users = g.n_users();
  field.unary.assign(field.n_users, {0.0, 0.0});

  for (int u = 0; u < g.n_users(); ++u) {
    auto tweets = g.tweets_of(u);
    if (!tweets.empty()) {
      const double w =
          (revealed[u] ? params.w_labeled : params.w_unlabeled) /
          static_cast<double>(tweets.size());
      const int base = g.tweet_offset(u);
      for (int k = 0; k < 2; ++k) {
        double s = 0.0;
        for (int t = 0; t < static_cast<int>(tweets.size()); ++t)
          s += params.mu[k][label_index(tweet_labels[base + t])];
        field.unary[u][k] = w * s;
      }
    }
    if (clamped[u]) field.unary[u][1 - label_index(*clamped[u])] = kNegInf;
  }

  field.pairs.reserve(g.support_edges().size());
  for (const auto& se : g.support_edges()) {
    PairwiseField::Pair p;
    p.a = se.a;
    p.b = se.b;
    const double wa =
        se.ab ? params.w_relation / static_cast<double>(g.neighbors(se.a).size())
              : 0.0;
    const double wb =
        se.ba ? params.w_relation / static_cast<double>(g.neighbors(se.b).size())
              : 0.0;
    for (int ka = 0; ka < 2; ++ka)
      for (int kb = 0; kb < 2; ++kb)
        p.logpot[ka * 2 + kb] =
            wa * params.lambda[ka][kb] + wb * params.lambda[kb][ka];
    field.pairs.push_back(p);
  }
  return field;
}

PairwiseField build_pairwise_field(const Graph& g, const FactorParams& params,
                                   const RevealedLabels& revealed,
                                   std::span<const Label> tweet_labels,
                                   const std::map<std::string, Label>& clamped) {
  RevealedLabels mask(g.n_users());
  for (const auto& [id, label] : clamped) {
    const int u = g.index_of(id);
    if (u < 0) throw ValidationError("clamped user not in graph: " + id);
    mask[u] = label;
  }
  return build_pairwise_field(g, params, revealed, tweet_labels, mask);
}

double field_log_potential(const PairwiseField& field,
                           std::span<const Label> labels) {
  double s = 0.0;
  for (int u = 0; u < field.n_users; ++u)
    s += field.unary[u][label_index(labels[u])];
  for (const auto& p : field.pairs)
    s += p.logpot[label_index(labels[p.a]) * 2 + label_index(labels[p.b])];
  return s;
}

// OpenMP kernel: every directed message of an iteration depends only on the
// previous iteration's messages, so the slots parallelize freely and the
// result does not depend on the thread count.
BPResult loopy_bp(const PairwiseField& field, const BPConfig& config) {
  if (!config.parallel) return loopy_bp_serial(field, config);
  check_config(config);

  MessageGraph mg(field);
  const int n_pairs = static_cast<int>(field.pairs.size());
  std::vector<std::array<double, 2>> next(mg.msg.size());

  BPResult result;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    double delta = 0.0;
    if (n_pairs > 0) {
#pragma omp parallel for schedule(static) reduction(max : delta)
      for (int e = 0; e < n_pairs; ++e)
        for (int dir = 0; dir < 2; ++dir) {
          const int slot = 2 * e + dir;
          const auto fresh = compute_message(field, mg, mg.msg, e, dir == 0);
          delta = std::max(delta, residual(fresh, mg.msg[slot]));
          next[slot] = damped(fresh, mg.msg[slot], config.damping);
        }
      mg.msg.swap(next);
    }
    result.delta_trace.push_back(delta);
    result.iterations = iter + 1;
    if (delta < config.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.marginals.resize(field.n_users);
#pragma omp parallel for schedule(static)
  for (int u = 0; u < field.n_users; ++u)
    result.marginals[u] = belief_of(field, mg, u);
  return result;
}

// Plain single-threaded reference used by the tests and the benchmark.
BPResult loopy_bp_serial(const PairwiseField& field, const BPConfig& config) {
  check_config(config);

  MessageGraph mg(field);
  const int n_pairs = static_cast<int>(field.pairs.size());
  std::vector<std::array<double, 2>> next(mg.msg.size());

  BPResult result;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    double delta = 0.0;
    for (int e = 0; e < n_pairs; ++e)
      for (int dir = 0; dir < 2; ++dir) {
        const int slot = 2 * e + dir;
        const auto fresh = compute_message(field, mg, mg.msg, e, dir == 0);
        delta = std::max(delta, residual(fresh, mg.msg[slot]));
        next[slot] = damped(fresh, mg.msg[slot], config.damping);
      }
    if (n_pairs > 0) mg.msg.swap(next);
    result.delta_trace.push_back(delta);
    result.iterations = iter + 1;
    if (delta < config.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.marginals.resize(field.n_users);
  for (int u = 0; u < field.n_users; ++u)
    result.marginals[u] = belief_of(field, mg, u);
  return result;
}

BruteForceResult brute_force_marginals(const PairwiseField& field) {
  const int n = field.n_users;
  if (n > 20)
    throw ValidationError("brute_force_marginals: more than 20 users");

  const std::size_t n_states = std::size_t{1} << n;
  std::vector<double> logpot(n_states);

#pragma omp parallel for schedule(static)
  for (long long s = 0; s < static_cast<long long>(n_states); ++s) {
    double lp = 0.0;
    for (int u = 0; u < n; ++u) lp += field.unary[u][(s >> u) & 1];
    for (const auto& p : field.pairs)
      lp += p.logpot[((s >> p.a) & 1) * 2 + ((s >> p.b) & 1)];
    logpot[s] = lp;
  }

  // serial reductions in a fixed order keep the result thread-independent
  double max_lp = kNegInf;
  for (double lp : logpot) max_lp = std::max(max_lp, lp);
  double z = 0.0;
  for (double lp : logpot) z += lp == kNegInf ? 0.0 : std::exp(lp - max_lp);
  const double log_z = max_lp + std::log(z);

  BruteForceResult result;
  result.log_partition = log_z;
  result.marginals.assign(n, {0.0, 0.0});
#pragma omp parallel for schedule(static)
  for (int u = 0; u < n; ++u) {
    double p[2] = {0.0, 0.0};
    for (std::size_t s = 0; s < n_states; ++s)
      if (logpot[s] != kNegInf)
        p[(s >> u) & 1] += std::exp(logpot[s] - log_z);
    result.marginals[u] = {p[0] / (p[0] + p[1]), p[1] / (p[0] + p[1])};
  }
  return result;
}

void write_bp_diagnostics_csv(const BPResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << "iteration,max_message_delta,converged\n";
  for (std::size_t i = 0; i < result.delta_trace.size(); ++i) {
    const bool last = i + 1 == result.delta_trace.size();
    out << i + 1 << ',' << result.delta_trace[i] << ','
        << ((last && result.converged) ? 1 : 0) << '\n';
  }
}

std::vector<Label> predict(const Graph& g, const RevealedLabels& revealed,
                           std::span<const Label> tweet_labels,
                           const PredictConfig& config,
                           std::vector<BPResult>* bp_diagnostics) {
  if (config.n_repeats < 1 || config.n_repeats % 2 == 0)
    throw ValidationError("predict: n_repeats must be odd");
  if (config.learn &&
      static_cast<int>(config.repeat_seeds.size()) != config.n_repeats)
    throw ValidationError("predict: learning needs one seed per repeat");

  const FactorParams base_params = no_learning_estimate(g, revealed);

  const int n = g.n_users();
  std::vector<int> votes(n, 0);
  for (int rep = 0; rep < config.n_repeats; ++rep) {
    FactorParams params = base_params;
    if (config.learn) {
      SampleRankConfig sr = config.sample_rank;
      sr.seed = config.repeat_seeds[rep];
      params = sample_rank(g, revealed, tweet_labels, sr, base_params).first;
    }
    auto field = build_pairwise_field(
        g, params, revealed, tweet_labels,
        config.clamp_revealed ? revealed : RevealedLabels(n));
    BPResult bp = loopy_bp(field, config.bp);
    for (int u = 0; u < n; ++u)
      if (bp.marginals[u][1] >= bp.marginals[u][0]) votes[u]++;
    if (bp_diagnostics) bp_diagnostics->push_back(std::move(bp));
  }

  std::vector<Label> labels(n);
  for (int u = 0; u < n; ++u) {
    if (revealed[u])
      labels[u] = *revealed[u];
    else
      labels[u] = votes[u] * 2 > config.n_repeats ? Label::Positive
                                                  : Label::Negative;
  }
  return labels;
}

}  // namespace sentnet
