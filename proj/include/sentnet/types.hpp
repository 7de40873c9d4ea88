#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace sentnet {

// Binary sentiment polarity. Integer codes are fixed: Negative=0, Positive=1.
enum class Label : int { Negative = 0, Positive = 1 };

inline int label_index(Label l) { return static_cast<int>(l); }
inline Label label_from_index(int k) {
  return k == 0 ? Label::Negative : Label::Positive;
}
inline Label opposite(Label l) {
  return l == Label::Positive ? Label::Negative : Label::Positive;
}

struct User {
  std::string id;
  std::optional<Label> gold;  // absent for permanently-unlabeled users
};

struct Tweet {
  std::string id;
  std::string user;  // author id
  std::string text;  // UTF-8
};

enum class EdgeKind { Follow, Mention };

struct RawEdge {
  std::string src;
  std::string dst;
  EdgeKind kind = EdgeKind::Follow;
};

enum class GraphVariant { DirectedFollow, MutualFollow, DirectedAt, MutualAt };

inline bool is_directed(GraphVariant v) {
  return v == GraphVariant::DirectedFollow || v == GraphVariant::DirectedAt;
}
inline bool uses_follow_edges(GraphVariant v) {
  return v == GraphVariant::DirectedFollow || v == GraphVariant::MutualFollow;
}

std::string to_string(GraphVariant v);
GraphVariant variant_from_string(const std::string& s);

// Raised for malformed inputs and violated preconditions; the CLI maps it
// to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sentnet
