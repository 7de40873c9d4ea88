#include "sentnet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sentnet/estimation.hpp"
#include "sentnet/net_stats.hpp"
#include "sentnet/rng.hpp"
#include "sentnet/text_model.hpp"

namespace sentnet {

std::string to_string(Method m) {
  switch (m) {
    case Method::SvmVote: return "svm-vote";
    case Method::HgmNoLearning: return "hgm-nolearning";
    case Method::HgmLearning: return "hgm-learning";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "svm-vote") return Method::SvmVote;
  if (s == "hgm-nolearning") return Method::HgmNoLearning;
  if (s == "hgm-learning") return Method::HgmLearning;
  throw ValidationError("unknown method: " + s);
}

std::vector<std::uint64_t> derive_run_seeds(std::uint64_t base, int n_runs) {
  std::vector<std::uint64_t> seeds(n_runs);
  for (int i = 0; i < n_runs; ++i) seeds[i] = derive_seed(base, i);
  return seeds;
}

// ---------------------------------------------------------------- t-test --

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // continued fraction (modified Lentz); converges quickly for
  // x < (a+1)/(a+b+2), otherwise use the symmetry I_x(a,b) = 1 - I_1mx(b,a)
  if (x > (a + 1.0) / (a + b + 2.0))
    return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);

  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front) / a;

  const double tiny = 1e-300;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double f = d;
  for (int m = 1; m <= 400; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    f *= d * c;

    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double step = d * c;
    f *= step;
    if (std::abs(step - 1.0) < 1e-12) break;
  }
  return front * f;
}

double student_t_upper_tail(double t, int df) {
  const double nu = df;
  const double x = nu / (nu + t * t);
  const double half = 0.5 * regularized_incomplete_beta(nu / 2.0, 0.5, x);
  return t >= 0.0 ? half : 1.0 - half;
}

std::pair<double, double> paired_t_test(std::span<const double> a,
                                        std::span<const double> b) {
  if (a.size() != b.size())
    throw ValidationError("paired_t_test: length mismatch");
  const int n = static_cast<int>(a.size());
  if (n < 2) throw ValidationError("paired_t_test: need n >= 2");

  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / (n - 1));

  if (sd == 0.0) {
    const double p = mean > 0.0 ? 0.0 : (mean < 0.0 ? 1.0 : 0.5);
    return {0.0, p};
  }
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  return {t, student_t_upper_tail(t, n - 1)};
}

Aggregate aggregate_stats(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {  // linear interpolation between order stats
    const double pos = q * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - lo;
    return v[lo] * (1.0 - frac) + v[hi] * frac;
  };
  Aggregate a;
  a.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  a.median = quantile(0.5);
  a.q25 = quantile(0.25);
  a.q75 = quantile(0.75);
  return a;
}

// ------------------------------------------------------------ components --

std::vector<int> largest_component(const Graph& g) {
  const int n = g.n_users();
  std::vector<int> comp(n, -1);
  int n_comps = 0;
  std::vector<int> stack;
  for (int start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    const int c = n_comps++;
    stack.push_back(start);
    comp[start] = c;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      auto visit = [&](int v) {
        if (comp[v] < 0) {
          comp[v] = c;
          stack.push_back(v);
        }
      };
      for (int v : g.neighbors(u)) visit(v);
      for (int v : g.in_neighbors(u)) visit(v);
    }
  }
  std::vector<long> size(n_comps, 0);
  for (int u = 0; u < n; ++u) size[comp[u]]++;
  // ties break toward the lowest component id, i.e. the smallest user id
  const int best = static_cast<int>(
      std::max_element(size.begin(), size.end()) - size.begin());
  std::vector<int> members;
  for (int u = 0; u < n; ++u)
    if (comp[u] == best) members.push_back(u);
  return members;
}

double component_accuracy(const Graph& g, std::span<const Label> predictions,
                          std::span<const std::optional<Label>> gold,
                          std::span<const int> scope) {
  if (scope.empty()) throw ValidationError("component_accuracy: empty scope");
  std::vector<char> in_lcc(g.n_users(), 0);
  for (int u : largest_component(g)) in_lcc[u] = 1;

  long total = 0, correct = 0;
  for (int u : scope) {
    if (!in_lcc[u]) continue;
    if (!gold[u])
      throw ValidationError("component_accuracy: scope user lacks gold");
    ++total;
    if (predictions[u] == *gold[u]) ++correct;
  }
  if (total == 0)
    throw ValidationError(
        "component_accuracy: no scope user in the largest component");
  return static_cast<double>(correct) / total;
}

// ------------------------------------------------------------ experiment --

namespace {

struct RunOutcome {
  PerfScore method_score;
  PerfScore baseline_score;
  double comp_acc = 0.0;
};

RunOutcome one_run(const ExperimentConfig& config, const Graph& g,
                   std::uint64_t run_seed,
                   std::vector<BPResult>* bp_diagnostics) {
  const int n = g.n_users();

  // Seeded split: train_per_class revealed users per class, rest evaluated.
  std::vector<int> pos, neg;
  for (int u = 0; u < n; ++u) {
    if (!g.user(u).gold) continue;  // permanently-unlabeled pool user
    (*g.user(u).gold == Label::Positive ? pos : neg).push_back(u);
  }
  const bool enough_per_class =
      static_cast<int>(pos.size()) >= config.train_per_class &&
      static_cast<int>(neg.size()) >= config.train_per_class;
  const bool has_remainder = static_cast<int>(pos.size() + neg.size()) >
                             2 * config.train_per_class;
  if (!enough_per_class || !has_remainder)
    throw ValidationError(
        "dataset needs train_per_class gold users per class plus a nonempty "
        "evaluation remainder");

  Rng split_rng(derive_seed(run_seed, 1));
  split_rng.shuffle(pos);
  split_rng.shuffle(neg);

  RevealedLabels revealed(n);
  for (int i = 0; i < config.train_per_class; ++i) {
    revealed[pos[i]] = Label::Positive;
    revealed[neg[i]] = Label::Negative;
  }
  std::vector<int> eval_scope;
  for (int u = 0; u < n; ++u)
    if (g.user(u).gold && !revealed[u]) eval_scope.push_back(u);
  std::sort(eval_scope.begin(), eval_scope.end());

  std::vector<std::optional<Label>> gold(n);
  for (int u = 0; u < n; ++u) gold[u] = g.user(u).gold;

  // Per-topic classifier trained on the revealed users' tweets, every tweet
  // inheriting its author's revealed label.
  std::vector<std::pair<TokenVector, Label>> training;
  for (int u = 0; u < n; ++u) {
    if (!revealed[u]) continue;
    for (const auto& t : g.tweets_of(u))
      training.emplace_back(tokenize(t.text), *revealed[u]);
  }
  const LinearModel model = train_classifier(
      training, config.svm_epochs, config.svm_reg, derive_seed(run_seed, 2));

  // Observed tweet evidence: revealed label for revealed authors, hard
  // classifier prediction otherwise.
  std::vector<Label> tweet_labels(g.n_tweets());
  std::vector<Label> vote(n, Label::Positive);
  for (int u = 0; u < n; ++u) {
    int pos_votes = 0, total = 0;
    const int base = g.tweet_offset(u);
    for (const auto& t : g.tweets_of(u)) {
      const Label pred = predict_label(model, t.text);
      tweet_labels[base + total] =
          revealed[u] ? *revealed[u] : pred;
      pos_votes += pred == Label::Positive ? 1 : 0;
      ++total;
    }
    vote[u] = 2 * pos_votes >= total ? Label::Positive : Label::Negative;
  }

  std::vector<Label> predictions;
  switch (config.method) {
    case Method::SvmVote:
      predictions = vote;
      break;
    case Method::HgmNoLearning:
    case Method::HgmLearning: {
      PredictConfig pc;
      pc.n_repeats = config.n_repeats;
      pc.learn = config.method == Method::HgmLearning;
      pc.bp = config.bp;
      pc.sample_rank.steps = config.sr_steps;
      pc.sample_rank.eta = config.sr_eta;
      pc.sample_rank.convergence_window = config.sr_window;
      pc.sample_rank.update_rule = config.update_rule;
      if (pc.learn)
        for (int rep = 0; rep < config.n_repeats; ++rep)
          pc.repeat_seeds.push_back(derive_seed(run_seed, 100 + rep));
      predictions = predict(g, revealed, tweet_labels, pc, bp_diagnostics);
      break;
    }
  }

  RunOutcome out;
  out.method_score = perf(predictions, gold, eval_scope);
  out.baseline_score = perf(vote, gold, eval_scope);
  out.comp_acc = component_accuracy(g, predictions, gold, eval_scope);
  return out;
}

Graph build_experiment_graph(const ExperimentConfig& config,
                             const Dataset& data) {
  auto tweets = filter_on_topic(data.tweets, config.topic_keyword);
  return build_graph(data.users, std::move(tweets), data.edges,
                     config.variant);
}

void check_config(const ExperimentConfig& config) {
  if (config.n_runs < 2)
    throw ValidationError("n_runs must be >= 2 for significance tests");
  if (config.train_per_class < 1)
    throw ValidationError("train_per_class must be >= 1");
  if (static_cast<int>(config.seeds.size()) != config.n_runs)
    throw ValidationError("seeds list must have one entry per run");
}

ExperimentReport run_on_graph(const ExperimentConfig& config, const Graph& g,
                              std::vector<BPResult>* first_run_bp) {
  check_config(config);

  ExperimentReport report;
  report.config = config;
  std::vector<double> acc, f1, cacc, base_acc, base_f1;
  for (int r = 0; r < config.n_runs; ++r) {
    const RunOutcome out = one_run(config, g, config.seeds[r],
                                   r == 0 ? first_run_bp : nullptr);
    RunMetrics m;
    m.seed = config.seeds[r];
    m.accuracy = out.method_score.accuracy;
    m.macro_f1 = out.method_score.macro_f1;
    m.component_accuracy = out.comp_acc;
    m.baseline_accuracy = out.baseline_score.accuracy;
    m.baseline_macro_f1 = out.baseline_score.macro_f1;
    report.runs.push_back(m);
    acc.push_back(m.accuracy);
    f1.push_back(m.macro_f1);
    cacc.push_back(m.component_accuracy);
    base_acc.push_back(m.baseline_accuracy);
    base_f1.push_back(m.baseline_macro_f1);
  }
  report.accuracy = aggregate_stats(acc);
  report.macro_f1 = aggregate_stats(f1);
  report.component_accuracy = aggregate_stats(cacc);
  if (config.method != Method::SvmVote) {
    auto [ta, pa] = paired_t_test(acc, base_acc);
    report.sig_accuracy = TTestResult{ta, pa, pa < 0.05};
    auto [tf, pf] = paired_t_test(f1, base_f1);
    report.sig_macro_f1 = TTestResult{tf, pf, pf < 0.05};
  }
  return report;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config,
                                const Dataset& data,
                                std::vector<BPResult>* first_run_bp) {
  return run_on_graph(config, build_experiment_graph(config, data),
                      first_run_bp);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  return run_experiment(
      config,
      load_dataset(config.users_path, config.tweets_path, config.edges_path));
}

std::vector<ExperimentReport> scale_unlabeled(
    const ExperimentConfig& config, const Dataset& data,
    std::span<const int> extra_unlabeled_counts) {
  std::vector<std::string> pool_ids;
  for (const auto& u : data.users)
    if (!u.gold) pool_ids.push_back(u.id);
  std::sort(pool_ids.begin(), pool_ids.end());

  std::vector<ExperimentReport> series;
  for (int count : extra_unlabeled_counts) {
    if (count < 0 || count > static_cast<int>(pool_ids.size()))
      throw ValidationError("unlabeled pool exhausted: requested " +
                            std::to_string(count) + " of " +
                            std::to_string(pool_ids.size()));
    std::set<std::string> keep_pool(pool_ids.begin(),
                                    pool_ids.begin() + count);
    Dataset subset;
    std::set<std::string> kept_users;
    for (const auto& u : data.users)
      if (u.gold || keep_pool.count(u.id)) {
        subset.users.push_back(u);
        kept_users.insert(u.id);
      }
    for (const auto& t : data.tweets)
      if (kept_users.count(t.user)) subset.tweets.push_back(t);
    for (const auto& e : data.edges)
      if (kept_users.count(e.src) && kept_users.count(e.dst))
        subset.edges.push_back(e);
    series.push_back(run_experiment(config, subset));
  }
  return series;
}

// ------------------------------------------------------------------ dot --

std::string dot_string(const Graph& g, std::span<const Label> labels) {
  if (static_cast<int>(labels.size()) != g.n_users())
    throw ValidationError("export_dot: labels must cover every user");
  std::ostringstream out;
  const bool directed = g.directed();
  out << (directed ? "digraph" : "graph") << " sentiment {\n";
  for (int u = 0; u < g.n_users(); ++u)
    out << "  \"" << g.user(u).id << "\" [style=filled, fillcolor="
        << (labels[u] == Label::Positive ? "green" : "red") << "];\n";
  for (const auto& se : g.support_edges()) {
    if (directed) {
      if (se.ab)
        out << "  \"" << g.user(se.a).id << "\" -> \"" << g.user(se.b).id
            << "\";\n";
      if (se.ba)
        out << "  \"" << g.user(se.b).id << "\" -> \"" << g.user(se.a).id
            << "\";\n";
    } else {
      out << "  \"" << g.user(se.a).id << "\" -- \"" << g.user(se.b).id
          << "\";\n";
    }
  }
  out << "}\n";
  return out.str();
}

void export_dot(const Graph& g, std::span<const Label> labels,
                const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << dot_string(g, labels);
  if (!out) throw ValidationError("write failure: " + path);
}

// --------------------------------------------------------------- reports --

namespace {

nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["users_path"] = c.users_path;
  j["tweets_path"] = c.tweets_path;
  j["edges_path"] = c.edges_path;
  j["topic_keyword"] = c.topic_keyword;
  j["variant"] = to_string(c.variant);
  j["method"] = to_string(c.method);
  j["n_runs"] = c.n_runs;
  j["train_per_class"] = c.train_per_class;
  j["seeds"] = c.seeds;
  j["update_rule"] = c.update_rule == UpdateRule::PaperLiteral
                         ? "paper"
                         : "sign-corrected";
  j["sr_steps"] = c.sr_steps;
  j["sr_eta"] = c.sr_eta;
  j["sr_window"] = c.sr_window;
  j["n_repeats"] = c.n_repeats;
  j["bp_max_iterations"] = c.bp.max_iterations;
  j["bp_damping"] = c.bp.damping;
  j["bp_tolerance"] = c.bp.tolerance;
  j["svm_epochs"] = c.svm_epochs;
  j["svm_reg"] = c.svm_reg;
  return j;
}

nlohmann::json aggregate_json(const Aggregate& a) {
  return {{"mean", a.mean},
          {"median", a.median},
          {"q25", a.q25},
          {"q75", a.q75}};
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["format"] = "sentnet-report";
  j["version"] = 1;
  j["config"] = config_json(report.config);
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.runs)
    runs.push_back({{"seed", r.seed},
                    {"accuracy", r.accuracy},
                    {"macro_f1", r.macro_f1},
                    {"component_accuracy", r.component_accuracy},
                    {"baseline_accuracy", r.baseline_accuracy},
                    {"baseline_macro_f1", r.baseline_macro_f1}});
  j["runs"] = std::move(runs);
  j["aggregate"] = {{"accuracy", aggregate_json(report.accuracy)},
                    {"macro_f1", aggregate_json(report.macro_f1)},
                    {"component_accuracy",
                     aggregate_json(report.component_accuracy)}};
  auto sig = [](const std::optional<TTestResult>& s) -> nlohmann::json {
    if (!s) return nullptr;
    return {{"t", s->t}, {"p", s->p}, {"significant", s->significant}};
  };
  j["significance"] = {{"accuracy", sig(report.sig_accuracy)},
                       {"macro_f1", sig(report.sig_macro_f1)}};
  return j.dump(2);
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "# sentnet per-run metrics, schema v1\n";
  out << "run,seed,accuracy,macro_f1,component_accuracy,baseline_accuracy,"
         "baseline_macro_f1\n";
  char buf[256];
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const auto& r = report.runs[i];
    std::snprintf(buf, sizeof buf, "%zu,%llu,%.9g,%.9g,%.9g,%.9g,%.9g\n", i,
                  static_cast<unsigned long long>(r.seed), r.accuracy,
                  r.macro_f1, r.component_accuracy, r.baseline_accuracy,
                  r.baseline_macro_f1);
    out << buf;
  }
  return out.str();
}

void write_report(const ExperimentReport& report, const std::string& json_path,
                  const std::string& csv_path) {
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) throw ValidationError("cannot write file: " + json_path);
    out << report_to_json(report) << '\n';
  }
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw ValidationError("cannot write file: " + csv_path);
    out << report_csv(report);
  }
}

}  // namespace sentnet
