#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rlorf/rng.hpp"
#include "rlorf/running_stats.hpp"

namespace rlorf {

class BinaryWriter;
class BinaryReader;

struct TreeConfig {
  std::uint32_t eta = 32;  // a leaf must have seen more than eta samples to split
  double beta = 0.01;      // minimum gain a split has to achieve
  std::uint32_t num_tests_per_feature = 10;
  std::optional<std::uint32_t> max_depth;  // unbounded when empty
  std::uint32_t warmup_count = 2;          // samples buffered before tests are drawn
  bool relative_gain = false;              // compare gain / RSS(parent) against beta

  // Throws ConfigError on out-of-range values.
  void validate() const;
  bool operator==(const TreeConfig&) const = default;
};

// Candidate split: x[feature_index] <= threshold goes left.
struct SplitTest {
  std::uint32_t feature_index = 0;
  double threshold = 0.0;
  RunningStats left_stats;
  RunningStats right_stats;

  bool goes_left(std::span<const double> x) const { return x[feature_index] <= threshold; }
  void push(std::span<const double> x, double y) {
    (goes_left(x) ? left_stats : right_stats).push(y);
  }
  bool operator==(const SplitTest&) const = default;
};

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const FeatureRange&) const = default;
};

// Draws d*k tests, k per feature, thresholds uniform over each feature's range.
std::vector<SplitTest> generate_tests(std::span<const FeatureRange> ranges,
                                      std::uint32_t tests_per_feature, Rng& rng);

// RSS(parent) - RSS(left) - RSS(right), clamped at zero. The parent must be the
// union of the test's two sides; a mismatch throws std::logic_error.
double rss_gain(const RunningStats& parent, const SplitTest& test);

class OnlineTree {
 public:
  static constexpr std::uint32_t kNoChild = 0xFFFFFFFFu;

  struct Node {
    RunningStats stats;  // everything routed here, including what the split inherited
    // Observations since the tests were drawn (warmup samples included).
    RunningStats window;
    std::vector<SplitTest> tests;
    std::vector<double> warmup;  // row-major (x..., y) until tests exist
    std::uint32_t feature_index = 0;
    double threshold = 0.0;
    std::uint32_t left = kNoChild;
    std::uint32_t right = kNoChild;
    std::uint32_t depth = 0;
    std::uint64_t birth = 0;  // index of the first update this node can receive directly

    bool is_leaf() const { return left == kNoChild; }
    bool operator==(const Node&) const = default;
  };

  OnlineTree(TreeConfig config, std::uint32_t dim, std::uint64_t seed);

  // Routes (x, y) to its leaf, updates statistics and splits when eta and beta allow.
  // Throws InputError (tree unchanged) on non-finite input or wrong dimension.
  void update(std::span<const double> x, double y);

  // Leaf mean, or 0.0 for a leaf without samples.
  double predict(std::span<const double> x) const;

  // Same as update/predict for input the caller has already validated.
  void update_unchecked(std::span<const double> x, double y);
  double predict_unchecked(std::span<const double> x) const { return nodes_[leaf_index(x)].stats.mean(); }

  std::uint32_t dim() const { return dim_; }
  const TreeConfig& config() const { return config_; }
  std::span<const Node> nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t leaf_count() const;
  std::uint32_t depth() const;
  std::uint64_t updates() const { return updates_; }
  std::uint32_t leaf_index(std::span<const double> x) const;

  // Replaces the threshold-drawing stream; used when a tree is duplicated.
  void reseed(std::uint64_t seed) { rng_.seed(seed); }

  // Same nodes and statistics, ignoring the random stream.
  bool same_structure(const OnlineTree& other) const {
    return dim_ == other.dim_ && config_ == other.config_ && nodes_ == other.nodes_;
  }
  bool operator==(const OnlineTree&) const = default;

  void save(BinaryWriter& out) const;
  static OnlineTree load(BinaryReader& in);

 private:
  OnlineTree() = default;

  void check_input(std::span<const double> x) const;
  void update_leaf(std::uint32_t leaf, std::span<const double> x, double y);
  void maybe_split(std::uint32_t leaf);
  void draw_tests(Node& node);

  TreeConfig config_;
  std::uint32_t dim_ = 0;
  std::vector<Node> nodes_;
  std::uint64_t updates_ = 0;
  Rng rng_;
};

}  // namespace rlorf
