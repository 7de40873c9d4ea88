#include "sentnet/text_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sentnet/rng.hpp"

namespace sentnet {
namespace {

std::uint32_t fnv1a_bucket(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::uint32_t>(h & (kFeatureBuckets - 1));
}

bool token_char(unsigned char c) {
  return std::isalnum(c) || c >= 0x80;  // multibyte UTF-8 stays in tokens
}

}  // namespace

std::vector<std::string> tokenize_terms(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    // a bare "#" / "@" with no following token characters is dropped
    if (!cur.empty() && cur != "#" && cur != "@") tokens.push_back(cur);
    cur.clear();
  };
  for (unsigned char c : text) {
    if (token_char(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if ((c == '#' || c == '@') && cur.empty()) {
      cur += static_cast<char>(c);  // prefix attaches to the next token
    } else {
      flush();
      if (c == '#' || c == '@') cur += static_cast<char>(c);
    }
  }
  flush();

  std::vector<std::string> terms = tokens;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
    terms.push_back(tokens[i] + "_" + tokens[i + 1]);
  return terms;
}

TokenVector tokenize(const std::string& text) {
  auto terms = tokenize_terms(text);
  std::vector<std::pair<std::uint32_t, double>> entries;
  entries.reserve(terms.size());
  for (const auto& t : terms) entries.emplace_back(fnv1a_bucket(t), 1.0);
  std::sort(entries.begin(), entries.end());
  TokenVector v;
  for (const auto& [id, w] : entries) {
    if (!v.entries.empty() && v.entries.back().first == id)
      v.entries.back().second += w;
    else
      v.entries.emplace_back(id, w);
  }
  return v;
}

double LinearModel::dot(const TokenVector& x) const {
  double s = 0.0;
  for (const auto& [id, w] : x.entries) {
    auto it = std::lower_bound(
        weights.begin(), weights.end(), id,
        [](const auto& e, std::uint32_t key) { return e.first < key; });
    if (it != weights.end() && it->first == id) s += it->second * w;
  }
  return s;
}

LinearModel train_classifier(
    const std::vector<std::pair<TokenVector, Label>>& examples, int epochs,
    double reg, std::uint64_t seed) {
  bool has_pos = false, has_neg = false;
  for (const auto& [x, y] : examples)
    (y == Label::Positive ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw ValidationError(
        "training set must contain at least one example of each class");

  std::vector<double> v(kFeatureBuckets, 0.0);  // w = scale * v
  double scale = 1.0, bias = 0.0;
  Rng rng(seed);
  std::vector<int> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    const double lr = 0.1 / (1.0 + epoch);
    rng.shuffle(order);
    for (int idx : order) {
      const auto& [x, label] = examples[idx];
      const double y = label == Label::Positive ? 1.0 : -1.0;
      double margin = bias;
      for (const auto& [id, w] : x.entries) margin += scale * v[id] * w;

      scale *= 1.0 - lr * reg;
      if (scale < 1e-9) {  // fold the scale back in before it underflows
        for (auto& w : v) w *= scale;
        scale = 1.0;
      }
      if (y * margin < 1.0) {
        for (const auto& [id, w] : x.entries) v[id] += lr * y * w / scale;
        bias += lr * y;
      }
    }
  }

  LinearModel m;
  m.bias = bias;
  for (std::uint32_t id = 0; id < kFeatureBuckets; ++id)
    if (v[id] != 0.0) m.weights.emplace_back(id, scale * v[id]);
  return m;
}

TweetPrediction predict_tweet(const LinearModel& m, const TokenVector& x,
                              const std::string& tweet_id) {
  TweetPrediction p;
  p.tweet_id = tweet_id;
  p.margin = m.dot(x) + m.bias;
  p.label = p.margin >= 0.0 ? Label::Positive : Label::Negative;
  return p;
}

Label predict_label(const LinearModel& m, const std::string& text) {
  return predict_tweet(m, tokenize(text)).label;
}

Label svm_vote(const Graph& g, const LinearModel& m, int user) {
  auto tweets = g.tweets_of(user);
  if (tweets.empty())
    throw ValidationError("svm_vote on a user with no tweets: " +
                          g.user(user).id);
  int pos = 0, neg = 0;
  for (const auto& t : tweets)
    (predict_label(m, t.text) == Label::Positive ? pos : neg)++;
  return pos >= neg ? Label::Positive : Label::Negative;
}

Label svm_vote(const Graph& g, const LinearModel& m,
               const std::string& user_id) {
  int u = g.index_of(user_id);
  if (u < 0) throw ValidationError("unknown user id: " + user_id);
  return svm_vote(g, m, u);
}

std::string model_to_json(const LinearModel& m) {
  nlohmann::json j;
  j["format"] = "sentnet-linear-model";
  j["version"] = 1;
  j["bias"] = m.bias;
  nlohmann::json w = nlohmann::json::array();
  for (const auto& [id, val] : m.weights)
    w.push_back(nlohmann::json::array({id, val}));
  j["weights"] = std::move(w);
  return j.dump();
}

LinearModel model_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || j.value("format", "") != "sentnet-linear-model" ||
      j.value("version", 0) != 1)
    throw ValidationError("not a version-1 linear model file");
  LinearModel m;
  m.bias = j.at("bias").get<double>();
  for (const auto& e : j.at("weights"))
    m.weights.emplace_back(e.at(0).get<std::uint32_t>(),
                           e.at(1).get<double>());
  std::sort(m.weights.begin(), m.weights.end());
  return m;
}

void save_model(const LinearModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << model_to_json(m) << '\n';
}

LinearModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace sentnet
