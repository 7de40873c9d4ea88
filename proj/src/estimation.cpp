#include "sentnet/estimation.hpp"

#include <array>
#include <cmath>

namespace sentnet {
namespace {

using Confusion = std::array<std::array<long, 2>, 2>;  // [gold][predicted]

PerfScore perf_from_counts(const Confusion& c) {
  const long total = c[0][0] + c[0][1] + c[1][0] + c[1][1];
  PerfScore s;
  s.accuracy = static_cast<double>(c[0][0] + c[1][1]) / total;
  double f1_sum = 0.0;
  for (int k = 0; k < 2; ++k) {
    const long tp = c[k][k];
    const long fp = c[1 - k][k];
    const long fn = c[k][1 - k];
    const double prec = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double rec = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    f1_sum += prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  }
  s.macro_f1 = f1_sum / 2.0;
  return s;
}

}  // namespace

FactorParams no_learning_estimate(const Graph& g,
                                  const RevealedLabels& revealed,
                                  std::vector<std::string>* warnings) {
  long counts[2][2] = {{0, 0}, {0, 0}};
  for (int u = 0; u < g.n_users(); ++u) {
    if (!revealed[u]) continue;
    const int k = label_index(*revealed[u]);
    for (int v : g.neighbors(u))
      if (revealed[v]) counts[k][label_index(*revealed[v])]++;
  }

  FactorParams p;
  p.mu = {{{1.0, 0.0}, {0.0, 1.0}}};
  for (int k = 0; k < 2; ++k) {
    const long denom = counts[k][0] + counts[k][1];
    if (denom == 0) {
      p.lambda[k][0] = p.lambda[k][1] = 0.5;
      if (warnings)
        warnings->push_back(
            "no revealed-to-revealed edges with source label " +
            std::to_string(k) + "; lambda row falls back to (0.5, 0.5)");
    } else {
      p.lambda[k][0] = static_cast<double>(counts[k][0]) / denom;
      p.lambda[k][1] = static_cast<double>(counts[k][1]) / denom;
    }
  }
  return p;
}

PerfScore perf(std::span<const Label> predicted,
               std::span<const std::optional<Label>> gold,
               std::span<const int> scope) {
  if (scope.empty()) throw ValidationError("perf: empty scope");
  Confusion c{{{0, 0}, {0, 0}}};
  for (int u : scope) {
    if (!gold[u])
      throw ValidationError("perf: scope user lacks a gold label");
    c[label_index(*gold[u])][label_index(predicted[u])]++;
  }
  return perf_from_counts(c);
}

Assignment sample_step(const Assignment& y, Rng& rng) {
  if (y.user_labels.empty())
    throw ValidationError("sample_step: empty assignment");
  Assignment out = y;
  const int u = rng.next_int(static_cast<int>(y.user_labels.size()));
  out.user_labels[u] = opposite(out.user_labels[u]);
  return out;
}

std::pair<FactorParams, Assignment> sample_rank(
    const Graph& g, const RevealedLabels& revealed,
    std::span<const Label> tweet_labels, const SampleRankConfig& config,
    const FactorParams& init_params, SampleRankTrace* trace) {
  const int n = g.n_users();
  if (n == 0) throw ValidationError("sample_rank: empty graph");
  bool any_revealed = false;
  for (const auto& r : revealed) any_revealed |= r.has_value();
  if (!any_revealed)
    throw ValidationError("sample_rank: needs at least one revealed user");
  if (config.steps < 1 || config.eta <= 0.0)
    throw ValidationError("sample_rank: steps >= 1 and eta > 0 required");

  Rng rng(config.seed);
  Assignment y;
  y.user_labels.resize(n);
  for (int u = 0; u < n; ++u)
    y.user_labels[u] = label_from_index(static_cast<int>(rng.next_below(2)));
  y.tweet_labels.assign(tweet_labels.begin(), tweet_labels.end());

  Confusion counts{{{0, 0}, {0, 0}}};
  for (int u = 0; u < n; ++u)
    if (revealed[u])
      counts[label_index(*revealed[u])][label_index(y.user_labels[u])]++;
  double perf_cur = perf_from_counts(counts).combined();

  FactorParams params = init_params;
  if (trace) {
    *trace = {};
    trace->accepted_perf.push_back(perf_cur);
  }

  int steps_since_update = 0;
  int n_updates = 0;
  int step = 0;
  for (; step < config.steps; ++step) {
    if (steps_since_update >= config.convergence_window) break;

    const int u = rng.next_int(n);
    const int k_old = label_index(y.user_labels[u]);
    const int k_new = 1 - k_old;

    // RelPerf of the single-flip candidate; zero unless u is revealed.
    double rel_perf = 0.0;
    double perf_new = perf_cur;
    if (revealed[u]) {
      const int gk = label_index(*revealed[u]);
      Confusion tmp = counts;
      tmp[gk][k_old]--;
      tmp[gk][k_new]++;
      perf_new = perf_from_counts(tmp).combined();
      rel_perf = perf_new - perf_cur;
    }

    bool updated = false;
    if (rel_perf != 0.0) {
      const double ratio = flip_llr(g, params, revealed, y, u);
      if ((rel_perf > 0.0 && ratio < 0.0) || (rel_perf < 0.0 && ratio > 0.0)) {
        const FeatureCounts grad = flip_gradient(g, params, revealed, y, u);
        const double dir = config.update_rule == UpdateRule::PaperLiteral
                               ? -1.0
                               : (rel_perf > 0.0 ? 1.0 : -1.0);
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            params.mu[k][l] += dir * config.eta * grad.f[k][l];
            params.lambda[k][l] += dir * config.eta * grad.h[k][l];
          }
        updated = true;
        ++n_updates;
      }
    }
    steps_since_update = updated ? 0 : steps_since_update + 1;

    if (rel_perf > 0.0) {
      y.user_labels[u] = label_from_index(k_new);
      const int gk = label_index(*revealed[u]);
      counts[gk][k_old]--;
      counts[gk][k_new]++;
      perf_cur = perf_new;
      if (trace) trace->accepted_perf.push_back(perf_cur);
    }
  }

  if (trace) {
    trace->steps_run = step;
    trace->n_updates = n_updates;
  }
  return {params, y};
}

}  // namespace sentnet
