#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentnet/dataset.hpp"
#include "sentnet/graph.hpp"
#include "sentnet/inference.hpp"

namespace sentnet {

enum class Method { SvmVote, HgmNoLearning, HgmLearning };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct ExperimentConfig {
  std::string users_path, tweets_path, edges_path;
  std::string topic_keyword;
  GraphVariant variant = GraphVariant::DirectedFollow;
  Method method = Method::SvmVote;
  int n_runs = 10;
  int train_per_class = 50;
  std::vector<std::uint64_t> seeds;  // length n_runs
  UpdateRule update_rule = UpdateRule::SignCorrected;
  int sr_steps = 20000;
  double sr_eta = 0.001;
  int sr_window = 2000;
  int n_repeats = 5;
  BPConfig bp;
  int svm_epochs = 20;
  double svm_reg = 1e-4;
};

// Per-run seeds derived from one base seed.
std::vector<std::uint64_t> derive_run_seeds(std::uint64_t base, int n_runs);

struct RunMetrics {
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double component_accuracy = 0.0;
  // SVM Vote on the identical split, for pairing.
  double baseline_accuracy = 0.0;
  double baseline_macro_f1 = 0.0;
};

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  bool significant = false;  // p < 0.05
};

struct Aggregate {
  double mean = 0.0, median = 0.0, q25 = 0.0, q75 = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<RunMetrics> runs;
  Aggregate accuracy, macro_f1, component_accuracy;
  // Method vs the SVM Vote baseline on paired splits; absent when the method
  // is the baseline itself.
  std::optional<TTestResult> sig_accuracy, sig_macro_f1;
};

// Runs the full protocol: per run, sample train_per_class revealed users per
// class, train the per-topic text classifier on their tweets, run the
// configured method, and score the remaining gold users. When given,
// first_run_bp collects the BP results (delta traces) of the first run.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const Dataset& data,
                                std::vector<BPResult>* first_run_bp = nullptr);
ExperimentReport run_experiment(const ExperimentConfig& config);

// One-sided paired t-test of a > b. Returns (t, p); sample sd with n-1
// denominator; sd = 0 degenerates to p = 0 / 0.5 / 1 by the sign of mean(d).
std::pair<double, double> paired_t_test(std::span<const double> a,
                                        std::span<const double> b);

// Upper-tail Student-t probability via the regularized incomplete beta.
double student_t_upper_tail(double t, int df);
double regularized_incomplete_beta(double a, double b, double x);

Aggregate aggregate_stats(std::span<const double> values);

// Accuracy restricted to scope users inside the largest weakly-connected
// component of g.
double component_accuracy(const Graph& g, std::span<const Label> predictions,
                          std::span<const std::optional<Label>> gold,
                          std::span<const int> scope);
std::vector<int> largest_component(const Graph& g);

// Reruns the experiment with growing prefixes of the dataset's unlabeled
// pool (users whose gold label is null). Count 0 strips the pool entirely.
std::vector<ExperimentReport> scale_unlabeled(
    const ExperimentConfig& config, const Dataset& data,
    std::span<const int> extra_unlabeled_counts);

// DOT graph with nodes filled green (positive) / red (negative).
void export_dot(const Graph& g, std::span<const Label> labels,
                const std::string& path);
std::string dot_string(const Graph& g, std::span<const Label> labels);

std::string report_to_json(const ExperimentReport& report);
std::string report_csv(const ExperimentReport& report);
void write_report(const ExperimentReport& report, const std::string& json_path,
                  const std::string& csv_path);

}  // namespace sentnet
