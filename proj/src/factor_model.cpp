#include "sentnet/factor_model.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"

namespace sentnet {
namespace {

inline double confidence_weight(const FactorParams& p, bool revealed) {
  return revealed ? p.w_labeled : p.w_unlabeled;
}

void accumulate_user(const Graph& g, const FactorParams& params,
                     const RevealedLabels& revealed, const Assignment& y,
                     int u, FeatureCounts& out) {
  const int k = label_index(y.user_labels[u]);
  auto tweets = g.tweets_of(u);
  if (!tweets.empty()) {
    const double w = confidence_weight(params, revealed[u].has_value()) /
                     static_cast<double>(tweets.size());
    const int base = g.tweet_offset(u);
    for (int t = 0; t < static_cast<int>(tweets.size()); ++t)
      out.f[k][label_index(y.tweet_labels[base + t])] += w;
  }
  auto nbrs = g.neighbors(u);
  if (!nbrs.empty()) {
    const double w = params.w_relation / static_cast<double>(nbrs.size());
    for (int v : nbrs) out.h[k][label_index(y.user_labels[v])] += w;
  }
}

}  // namespace

double user_tweet_feature(const Graph& g, const FactorParams& params,
                          const RevealedLabels& revealed, int user, int tweet,
                          const Assignment& y, Label k, Label l) {
  if (y.user_labels[user] != k || y.tweet_labels[tweet] != l) return 0.0;
  return confidence_weight(params, revealed[user].has_value()) /
         static_cast<double>(g.tweets_of(user).size());
}

double user_user_feature(const Graph& g, const FactorParams& params, int u,
                         int v, const Assignment& y, Label k, Label l) {
  if (y.user_labels[u] != k || y.user_labels[v] != l) return 0.0;
  return params.w_relation / static_cast<double>(g.neighbors(u).size());
}

FeatureCounts feature_counts_serial(const Graph& g, const FactorParams& params,
                                    const RevealedLabels& revealed,
                                    const Assignment& y) {
  FeatureCounts c;
  for (int u = 0; u < g.n_users(); ++u)
    accumulate_user(g, params, revealed, y, u, c);
  return c;
}

FeatureCounts feature_counts(const Graph& g, const FactorParams& params,
                             const RevealedLabels& revealed,
                             const Assignment& y) {
#ifdef _OPENMP
  const int n_threads = omp_get_max_threads();
  std::vector<FeatureCounts> partial(n_threads);
#pragma omp parallel num_threads(n_threads)
  {
    FeatureCounts& mine = partial[omp_get_thread_num()];
#pragma omp for schedule(static)
    for (int u = 0; u < g.n_users(); ++u)
      accumulate_user(g, params, revealed, y, u, mine);
  }
  // combine in thread order so repeated runs agree bitwise
  FeatureCounts c;
  for (const auto& p : partial)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) {
        c.f[k][l] += p.f[k][l];
        c.h[k][l] += p.h[k][l];
      }
  return c;
#else
  return feature_counts_serial(g, params, revealed, y);
#endif
}

double log_score(const FactorParams& params, const FeatureCounts& counts) {
  double s = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      s += params.mu[k][l] * counts.f[k][l] +
           params.lambda[k][l] * counts.h[k][l];
  return s;
}

double log_score(const Graph& g, const FactorParams& params,
                 const RevealedLabels& revealed, const Assignment& y) {
  return log_score(params, feature_counts_serial(g, params, revealed, y));
}

double llr(const Graph& g, const FactorParams& params,
           const RevealedLabels& revealed, const Assignment& y_new,
           const Assignment& y_old) {
  return log_score(g, params, revealed, y_new) -
         log_score(g, params, revealed, y_old);
}

FeatureCounts llr_gradient(const Graph& g, const FactorParams& params,
                           const RevealedLabels& revealed,
                           const Assignment& y_new, const Assignment& y_old) {
  FeatureCounts a = feature_counts_serial(g, params, revealed, y_new);
  FeatureCounts b = feature_counts_serial(g, params, revealed, y_old);
  FeatureCounts grad;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      grad.f[k][l] = a.f[k][l] - b.f[k][l];
      grad.h[k][l] = a.h[k][l] - b.h[k][l];
    }
  return grad;
}

// Only terms touching `user` change under a single flip: its own tweet and
// neighbor factors, plus the factors of users that point at it.
FeatureCounts flip_gradient(const Graph& g, const FactorParams& params,
                            const RevealedLabels& revealed,
                            const Assignment& y, int user) {
  FeatureCounts grad;
  const int k_old = label_index(y.user_labels[user]);
  const int k_new = 1 - k_old;

  auto tweets = g.tweets_of(user);
  if (!tweets.empty()) {
    const double w = confidence_weight(params, revealed[user].has_value()) /
                     static_cast<double>(tweets.size());
    const int base = g.tweet_offset(user);
    for (int t = 0; t < static_cast<int>(tweets.size()); ++t) {
      const int l = label_index(y.tweet_labels[base + t]);
      grad.f[k_new][l] += w;
      grad.f[k_old][l] -= w;
    }
  }

  auto out = g.neighbors(user);
  if (!out.empty()) {
    const double w = params.w_relation / static_cast<double>(out.size());
    for (int v : out) {
      const int l = label_index(y.user_labels[v]);
      grad.h[k_new][l] += w;
      grad.h[k_old][l] -= w;
    }
  }
  for (int v : g.in_neighbors(user)) {
    const double w =
        params.w_relation / static_cast<double>(g.neighbors(v).size());
    const int kv = label_index(y.user_labels[v]);
    grad.h[kv][k_new] += w;
    grad.h[kv][k_old] -= w;
  }
  return grad;
}

double flip_llr(const Graph& g, const FactorParams& params,
                const RevealedLabels& revealed, const Assignment& y,
                int user) {
  return log_score(params, flip_gradient(g, params, revealed, y, user));
}

std::string params_to_json(const FactorParams& p) {
  nlohmann::json j;
  j["mu"] = {{p.mu[0][0], p.mu[0][1]}, {p.mu[1][0], p.mu[1][1]}};
  j["lambda"] = {{p.lambda[0][0], p.lambda[0][1]},
                 {p.lambda[1][0], p.lambda[1][1]}};
  j["w_labeled"] = p.w_labeled;
  j["w_unlabeled"] = p.w_unlabeled;
  j["w_relation"] = p.w_relation;
  return j.dump();
}

FactorParams params_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ValidationError("malformed parameter JSON");
  FactorParams p;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      p.mu[k][l] = j.at("mu").at(k).at(l).get<double>();
      p.lambda[k][l] = j.at("lambda").at(k).at(l).get<double>();
    }
  p.w_labeled = j.at("w_labeled").get<double>();
  p.w_unlabeled = j.at("w_unlabeled").get<double>();
  p.w_relation = j.at("w_relation").get<double>();
  if (!(std::isfinite(p.w_labeled) && p.w_labeled > 0) ||
      !(std::isfinite(p.w_unlabeled) && p.w_unlabeled > 0) ||
      !(std::isfinite(p.w_relation) && p.w_relation > 0))
    throw ValidationError("confidence weights must be positive and finite");
  return p;
}

}  // namespace sentnet
