// Command-line frontend: synthetic data generation, network statistics,
// baseline training/prediction, experiment runs, unlabeled-data scaling and
// DOT export.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sentnet/dataset.hpp"
#include "sentnet/harness.hpp"
#include "sentnet/inference.hpp"
#include "sentnet/net_stats.hpp"
#include "sentnet/synth.hpp"
#include "sentnet/text_model.hpp"

namespace {

using namespace sentnet;

struct DatasetArgs {
  std::string users, tweets, edges, topic;

  void attach(CLI::App* cmd) {
    cmd->add_option("--users", users, "users JSONL file")->required();
    cmd->add_option("--tweets", tweets, "tweets JSONL file")->required();
    cmd->add_option("--edges", edges, "edges TSV file")->required();
    cmd->add_option("--topic", topic, "topic keyword")->required();
  }

  Dataset load() const { return load_dataset(users, tweets, edges); }

  Graph graph(GraphVariant variant) const {
    Dataset d = load();
    return build_graph(std::move(d.users),
                       filter_on_topic(d.tweets, topic), std::move(d.edges),
                       variant);
  }
};

std::vector<std::pair<TokenVector, Label>> labeled_tweets(const Graph& g) {
  std::vector<std::pair<TokenVector, Label>> out;
  for (int u = 0; u < g.n_users(); ++u) {
    if (!g.user(u).gold) continue;
    for (const auto& t : g.tweets_of(u))
      out.emplace_back(tokenize(t.text), *g.user(u).gold);
  }
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"User-level sentiment classification over social graphs"};
  app.require_subcommand(1);
  app.set_config("--config");

  // ---- synth ----
  SynthConfig synth_cfg;
  std::string synth_out = "data";
  auto* synth_cmd =
      app.add_subcommand("synth", "generate a planted-homophily dataset");
  synth_cmd->add_option("--out", synth_out, "output directory");
  synth_cmd->add_option("--users", synth_cfg.n_users, "labeled users");
  synth_cmd->add_option("--balance", synth_cfg.class_balance,
                        "positive class share");
  synth_cmd->add_option("--p-same", synth_cfg.p_edge_same,
                        "follow edge prob, same labels");
  synth_cmd->add_option("--p-diff", synth_cfg.p_edge_diff,
                        "follow edge prob, different labels");
  synth_cmd->add_option("--mutual-frac", synth_cfg.mutual_fraction,
                        "reverse-edge completion probability");
  synth_cmd->add_option("--at-same", synth_cfg.p_at_same,
                        "mention edge prob, same labels");
  synth_cmd->add_option("--at-diff", synth_cfg.p_at_diff,
                        "mention edge prob, different labels");
  synth_cmd->add_option("--tweets-min", synth_cfg.tweets_min, "");
  synth_cmd->add_option("--tweets-max", synth_cfg.tweets_max, "");
  synth_cmd->add_option("--noise", synth_cfg.tweet_noise,
                        "wrong-class tweet probability");
  synth_cmd->add_option("--vocab", synth_cfg.vocab_size, "vocabulary size");
  synth_cmd->add_option("--separation", synth_cfg.vocab_separation,
                        "class-specific vocabulary mass");
  synth_cmd->add_option("--pool", synth_cfg.pool_users,
                        "extra unlabeled pool users");
  synth_cmd->add_option("--pool-noise", synth_cfg.pool_tweet_noise,
                        "tweet noise of pool users");
  synth_cmd->add_option("--topic", synth_cfg.topic_keyword, "topic keyword");
  synth_cmd->add_option("--seed", synth_cfg.seed, "generator seed");

  // ---- stats ----
  DatasetArgs stats_args;
  std::string stats_out;
  auto* stats_cmd =
      app.add_subcommand("stats", "homophily statistics CSV (all variants)");
  stats_args.attach(stats_cmd);
  stats_cmd->add_option("--out", stats_out, "output CSV (default stdout)");

  // ---- train-baseline ----
  DatasetArgs train_args;
  std::string train_model_out = "model.json";
  int train_epochs = 20;
  double train_reg = 1e-4;
  std::uint64_t train_seed = 1;
  auto* train_cmd = app.add_subcommand(
      "train-baseline", "train the tweet-level text classifier");
  train_args.attach(train_cmd);
  train_cmd->add_option("--out", train_model_out, "model output path");
  train_cmd->add_option("--epochs", train_epochs, "");
  train_cmd->add_option("--reg", train_reg, "L2 strength");
  train_cmd->add_option("--seed", train_seed, "");

  // ---- predict-baseline ----
  DatasetArgs pred_args;
  std::string pred_model = "model.json", pred_out;
  auto* pred_cmd = app.add_subcommand(
      "predict-baseline", "per-user majority vote of the text classifier");
  pred_args.attach(pred_cmd);
  pred_cmd->add_option("--model", pred_model, "model path");
  pred_cmd->add_option("--out", pred_out, "output CSV (default stdout)");

  // ---- run / scale-unlabeled ----
  DatasetArgs run_args;
  ExperimentConfig run_cfg;
  std::string run_method = "svm-vote", run_variant = "directed-follow";
  std::string run_update = "sign-corrected";
  std::uint64_t run_seed = 1;
  std::string run_json = "report.json", run_csv, run_bp_diag;
  auto* run_cmd = app.add_subcommand("run", "run a full experiment");
  run_args.attach(run_cmd);
  run_cmd->add_option("--method", run_method,
                      "svm-vote|hgm-nolearning|hgm-learning");
  run_cmd->add_option("--variant", run_variant,
                      "directed-follow|mutual-follow|directed-at|mutual-at");
  run_cmd->add_option("--runs", run_cfg.n_runs, "repetitions");
  run_cmd->add_option("--train-per-class", run_cfg.train_per_class, "");
  run_cmd->add_option("--seed", run_seed, "base seed for all runs");
  run_cmd->add_option("--update-rule", run_update, "paper|sign-corrected");
  run_cmd->add_option("--repeats", run_cfg.n_repeats,
                      "learning-then-inference repetitions");
  run_cmd->add_option("--steps", run_cfg.sr_steps, "SampleRank steps");
  run_cmd->add_option("--eta", run_cfg.sr_eta, "SampleRank learning rate");
  run_cmd->add_option("--out", run_json, "report JSON path");
  run_cmd->add_option("--csv", run_csv, "per-run CSV path");
  run_cmd->add_option("--bp-diagnostics", run_bp_diag,
                      "BP delta-trace CSV for the first run");

  std::string scale_counts = "0";
  std::string scale_json = "scale_report.json";
  auto* scale_cmd = app.add_subcommand(
      "scale-unlabeled", "rerun while growing the unlabeled pool");
  DatasetArgs scale_args;
  ExperimentConfig scale_cfg;
  std::string scale_method = "hgm-learning",
              scale_variant = "directed-follow",
              scale_update = "sign-corrected";
  std::uint64_t scale_seed = 1;
  scale_args.attach(scale_cmd);
  scale_cmd->add_option("--counts", scale_counts,
                        "comma-separated pool sizes, e.g. 0,100,200");
  scale_cmd->add_option("--method", scale_method, "");
  scale_cmd->add_option("--variant", scale_variant, "");
  scale_cmd->add_option("--runs", scale_cfg.n_runs, "");
  scale_cmd->add_option("--train-per-class", scale_cfg.train_per_class, "");
  scale_cmd->add_option("--seed", scale_seed, "");
  scale_cmd->add_option("--update-rule", scale_update, "");
  scale_cmd->add_option("--repeats", scale_cfg.n_repeats, "");
  scale_cmd->add_option("--steps", scale_cfg.sr_steps, "");
  scale_cmd->add_option("--eta", scale_cfg.sr_eta, "");
  scale_cmd->add_option("--out", scale_json, "series report JSON path");

  // ---- export-dot ----
  DatasetArgs dot_args;
  std::string dot_variant = "directed-follow", dot_out = "graph.dot";
  std::string dot_labels_csv;
  auto* dot_cmd =
      app.add_subcommand("export-dot", "write a colored DOT graph");
  dot_args.attach(dot_cmd);
  dot_cmd->add_option("--variant", dot_variant, "");
  dot_cmd->add_option("--out", dot_out, "DOT output path");
  dot_cmd->add_option("--labels-csv", dot_labels_csv,
                      "user,label CSV overriding gold labels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help stays success, bad flags validate
  }

  try {
    if (*synth_cmd) {
      Dataset d = generate(synth_cfg);
      write_dataset(d, synth_cfg, synth_out);
      std::cerr << "wrote " << d.users.size() << " users, " << d.tweets.size()
                << " tweets, " << d.edges.size() << " edges to " << synth_out
                << "\n";
    } else if (*stats_cmd) {
      Dataset d = stats_args.load();
      auto tweets = filter_on_topic(d.tweets, stats_args.topic);
      std::string csv = stats_csv_header() + "\n";
      for (GraphVariant v :
           {GraphVariant::DirectedFollow, GraphVariant::MutualFollow,
            GraphVariant::DirectedAt, GraphVariant::MutualAt}) {
        Graph g = build_graph(d.users, tweets, d.edges, v);
        csv += stats_csv_row(stats_args.topic, g) + "\n";
      }
      emit(csv, stats_out);
    } else if (*train_cmd) {
      Graph g = train_args.graph(GraphVariant::DirectedFollow);
      auto examples = labeled_tweets(g);
      LinearModel m =
          train_classifier(examples, train_epochs, train_reg, train_seed);
      save_model(m, train_model_out);
      std::cerr << "trained on " << examples.size() << " tweets, "
                << m.weights.size() << " nonzero weights -> "
                << train_model_out << "\n";
    } else if (*pred_cmd) {
      Graph g = pred_args.graph(GraphVariant::DirectedFollow);
      LinearModel m = load_model(pred_model);
      std::string csv = "user,label\n";
      for (int u = 0; u < g.n_users(); ++u)
        csv += g.user(u).id + "," +
               (svm_vote(g, m, u) == Label::Positive ? std::string("pos")
                                                     : std::string("neg")) +
               "\n";
      emit(csv, pred_out);
    } else if (*run_cmd) {
      run_cfg.users_path = run_args.users;
      run_cfg.tweets_path = run_args.tweets;
      run_cfg.edges_path = run_args.edges;
      run_cfg.topic_keyword = run_args.topic;
      run_cfg.method = method_from_string(run_method);
      run_cfg.variant = variant_from_string(run_variant);
      run_cfg.update_rule = run_update == "paper" ? UpdateRule::PaperLiteral
                                                  : UpdateRule::SignCorrected;
      run_cfg.seeds = derive_run_seeds(run_seed, run_cfg.n_runs);
      std::vector<BPResult> bp_diag;
      ExperimentReport report =
          run_experiment(run_cfg, run_args.load(),
                         run_bp_diag.empty() ? nullptr : &bp_diag);
      write_report(report, run_json, run_csv);
      if (!run_bp_diag.empty() && !bp_diag.empty())
        write_bp_diagnostics_csv(bp_diag.front(), run_bp_diag);
      std::cout << "mean accuracy " << report.accuracy.mean;
      if (report.sig_accuracy)
        std::cout << " (vs baseline p=" << report.sig_accuracy->p << ")";
      std::cout << "\n";
    } else if (*scale_cmd) {
      scale_cfg.users_path = scale_args.users;
      scale_cfg.tweets_path = scale_args.tweets;
      scale_cfg.edges_path = scale_args.edges;
      scale_cfg.topic_keyword = scale_args.topic;
      scale_cfg.method = method_from_string(scale_method);
      scale_cfg.variant = variant_from_string(scale_variant);
      scale_cfg.update_rule = scale_update == "paper"
                                  ? UpdateRule::PaperLiteral
                                  : UpdateRule::SignCorrected;
      scale_cfg.seeds = derive_run_seeds(scale_seed, scale_cfg.n_runs);
      std::vector<int> counts;
      std::stringstream ss(scale_counts);
      for (std::string part; std::getline(ss, part, ',');)
        counts.push_back(std::stoi(part));
      Dataset d = scale_args.load();
      auto series = scale_unlabeled(scale_cfg, d, counts);
      nlohmann::json j = nlohmann::json::array();
      for (std::size_t i = 0; i < series.size(); ++i)
        j.push_back({{"extra_unlabeled", counts[i]},
                     {"report", nlohmann::json::parse(
                                    report_to_json(series[i]))}});
      emit(j.dump(2) + "\n", scale_json);
      for (std::size_t i = 0; i < series.size(); ++i)
        std::cout << "pool " << counts[i] << ": mean component accuracy "
                  << series[i].component_accuracy.mean << "\n";
    } else if (*dot_cmd) {
      Graph g = dot_args.graph(variant_from_string(dot_variant));
      std::vector<Label> labels(g.n_users());
      if (dot_labels_csv.empty()) {
        for (int u = 0; u < g.n_users(); ++u) {
          if (!g.user(u).gold)
            throw ValidationError("user without gold label needs --labels-csv: " +
                                  g.user(u).id);
          labels[u] = *g.user(u).gold;
        }
      } else {
        std::ifstream in(dot_labels_csv);
        if (!in)
          throw ValidationError("cannot open file: " + dot_labels_csv);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
          auto comma = line.find(',');
          if (comma == std::string::npos) continue;
          int u = g.index_of(line.substr(0, comma));
          if (u < 0) continue;
          labels[u] = line.substr(comma + 1) == "pos" ? Label::Positive
                                                      : Label::Negative;
        }
      }
      export_dot(g, labels, dot_out);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
