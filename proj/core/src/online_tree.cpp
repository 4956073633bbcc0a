#include "rlorf/online_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rlorf/error.hpp"
#include "rlorf/serialize.hpp"

namespace rlorf {

namespace {

constexpr std::uint32_t kTreeTag = 0x54524545;  // "TREE"

void write_stats(BinaryWriter& out, const RunningStats& s) {
  out.write(s.count);
  out.write(s.sum_y);
  out.write(s.sum_y_sq);
}

RunningStats read_stats(BinaryReader& in) {
  RunningStats s;
  s.count = in.read<std::uint64_t>();
  s.sum_y = in.read<double>();
  s.sum_y_sq = in.read<double>();
  return s;
}

}  // namespace

void TreeConfig::validate() const {
  if (eta < 2) throw ConfigError("eta must be >= 2, got " + std::to_string(eta));
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be a finite non-negative number");
  if (num_tests_per_feature == 0) throw ConfigError("num_tests_per_feature must be positive");
  if (warmup_count == 0) throw ConfigError("warmup_count must be positive");
  if (max_depth && *max_depth == 0) throw ConfigError("max_depth must be positive when set");
}

std::vector<SplitTest> generate_tests(std::span<const FeatureRange> ranges,
                                      std::uint32_t tests_per_feature, Rng& rng) {
  std::vector<SplitTest> tests;
  tests.reserve(ranges.size() * tests_per_feature);
  for (std::uint32_t f = 0; f < ranges.size(); ++f) {
    const auto [lo, hi] = ranges[f];
    std::uniform_real_distribution<double> dist(lo, hi);
    for (std::uint32_t i = 0; i < tests_per_feature; ++i) {
      SplitTest t;
      t.feature_index = f;
      t.threshold = lo < hi ? dist(rng) : lo;
      tests.push_back(t);
    }
  }
  return tests;
}

double rss_gain(const RunningStats& parent, const SplitTest& test) {
  if (parent.count != test.left_stats.count + test.right_stats.count) {
    throw std::logic_error("rss_gain: parent count " + std::to_string(parent.count) +
                           " != left + right " +
                           std::to_string(test.left_stats.count + test.right_stats.count));
  }
  if (test.left_stats.count == 0 || test.right_stats.count == 0) return 0.0;
  const double gain = parent.rss() - test.left_stats.rss() - test.right_stats.rss();
  return gain > 0.0 ? gain : 0.0;
}

OnlineTree::OnlineTree(TreeConfig config, std::uint32_t dim, std::uint64_t seed)
    : config_(std::move(config)), dim_(dim), rng_(seed) {
  config_.validate();
  if (dim_ == 0) throw ConfigError("tree dimension must be positive");
  nodes_.emplace_back();
}

void OnlineTree::check_input(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw InputError("feature vector has " + std::to_string(x.size()) + " entries, expected " +
                     std::to_string(dim_));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw InputError("non-finite feature value");
  }
}

std::uint32_t OnlineTree::leaf_index(std::span<const double> x) const {
  std::uint32_t j = 0;
  while (!nodes_[j].is_leaf()) {
    const Node& n = nodes_[j];
    j = x[n.feature_index] <= n.threshold ? n.left : n.right;
  }
  return j;
}

void OnlineTree::update(std::span<const double> x, double y) {
  check_input(x);
  if (!std::isfinite(y)) throw InputError("non-finite target");
  update_unchecked(x, y);
}

void OnlineTree::update_unchecked(std::span<const double> x, double y) {
  // internal nodes keep counting what passes through them
  std::uint32_t j = 0;
  while (!nodes_[j].is_leaf()) {
    Node& n = nodes_[j];
    n.stats.push(y);
    j = x[n.feature_index] <= n.threshold ? n.left : n.right;
  }
  update_leaf(j, x, y);
  ++updates_;
}

double OnlineTree::predict(std::span<const double> x) const {
  check_input(x);
  return predict_unchecked(x);
}

void OnlineTree::update_leaf(std::uint32_t leaf, std::span<const double> x, double y) {
  Node& node = nodes_[leaf];
  node.stats.push(y);
  node.window.push(y);

  if (config_.max_depth && node.depth >= *config_.max_depth) return;

  if (node.tests.empty()) {
    node.warmup.insert(node.warmup.end(), x.begin(), x.end());
    node.warmup.push_back(y);
    if (node.window.count < config_.warmup_count) return;
    draw_tests(node);
  } else {
    for (SplitTest& t : node.tests) t.push(x, y);
  }
  if (node.stats.count > config_.eta) maybe_split(leaf);
}

void OnlineTree::draw_tests(Node& node) {
  const std::size_t stride = dim_ + 1;
  const std::size_t rows = node.warmup.size() / stride;
  std::vector<FeatureRange> ranges(dim_);
  for (std::uint32_t f = 0; f < dim_; ++f) {
    ranges[f] = {node.warmup[f], node.warmup[f]};
    for (std::size_t r = 1; r < rows; ++r) {
      const double v = node.warmup[r * stride + f];
      ranges[f].min = std::min(ranges[f].min, v);
      ranges[f].max = std::max(ranges[f].max, v);
    }
  }
  node.tests = generate_tests(ranges, config_.num_tests_per_feature, rng_);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::span<const double> row(node.warmup.data() + r * stride, dim_);
    const double y = node.warmup[r * stride + dim_];
    for (SplitTest& t : node.tests) t.push(row, y);
  }
  std::vector<double>().swap(node.warmup);
}

void OnlineTree::maybe_split(std::uint32_t leaf) {
  const Node& node = nodes_[leaf];
  const double parent_rss = node.window.rss();
  std::size_t best = node.tests.size();
  double best_gain = 0.0;
  for (std::size_t i = 0; i < node.tests.size(); ++i) {
    const double g = rss_gain(node.window, node.tests[i]);
    const double score = config_.relative_gain ? (parent_rss > 0.0 ? g / parent_rss : 0.0) : g;
    if (score > config_.beta && (best == node.tests.size() || score > best_gain)) {
      best = i;
      best_gain = score;
    }
  }
  if (best == node.tests.size()) return;

  const SplitTest winner = node.tests[best];
  const auto child_depth = node.depth + 1;
  const auto left = static_cast<std::uint32_t>(nodes_.size());

  Node l;
  l.stats = winner.left_stats;
  l.depth = child_depth;
  l.birth = updates_ + 1;
  Node r;
  r.stats = winner.right_stats;
  r.depth = child_depth;
  r.birth = updates_ + 1;
  nodes_.push_back(std::move(l));
  nodes_.push_back(std::move(r));

  Node& parent = nodes_[leaf];  // push_back may have reallocated
  parent.feature_index = winner.feature_index;
  parent.threshold = winner.threshold;
  parent.left = left;
  parent.right = left + 1;
  std::vector<SplitTest>().swap(parent.tests);
}

std::size_t OnlineTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(),
                                                [](const Node& n) { return n.is_leaf(); }));
}

std::uint32_t OnlineTree::depth() const {
  std::uint32_t d = 0;
  for (const Node& n : nodes_) d = std::max(d, n.depth);
  return d;
}

void OnlineTree::save(BinaryWriter& out) const {
  out.write(kTreeTag);
  out.write(config_.eta);
  out.write(config_.beta);
  out.write(config_.num_tests_per_feature);
  out.write<std::uint32_t>(config_.max_depth.value_or(0));
  out.write(config_.warmup_count);
  out.write<std::uint8_t>(config_.relative_gain ? 1 : 0);
  out.write(dim_);
  out.write(updates_);
  out.write_rng(rng_);
  out.write<std::uint64_t>(nodes_.size());
  for (const Node& n : nodes_) {
    write_stats(out, n.stats);
    write_stats(out, n.window);
    out.write(n.feature_index);
    out.write(n.threshold);
    out.write(n.left);
    out.write(n.right);
    out.write(n.depth);
    out.write(n.birth);
    out.write<std::uint64_t>(n.tests.size());
    for (const SplitTest& t : n.tests) {
      out.write(t.feature_index);
      out.write(t.threshold);
      write_stats(out, t.left_stats);
      write_stats(out, t.right_stats);
    }
    out.write<std::uint64_t>(n.warmup.size());
    for (double v : n.warmup) out.write(v);
  }
}

OnlineTree OnlineTree::load(BinaryReader& in) {
  in.expect_tag(kTreeTag, "tree");
  OnlineTree tree;
  tree.config_.eta = in.read<std::uint32_t>();
  tree.config_.beta = in.read<double>();
  tree.config_.num_tests_per_feature = in.read<std::uint32_t>();
  if (const auto depth = in.read<std::uint32_t>(); depth != 0) tree.config_.max_depth = depth;
  tree.config_.warmup_count = in.read<std::uint32_t>();
  tree.config_.relative_gain = in.read<std::uint8_t>() != 0;
  tree.config_.validate();
  tree.dim_ = in.read<std::uint32_t>();
  tree.updates_ = in.read<std::uint64_t>();
  tree.rng_ = in.read_rng();
  const auto count = in.read<std::uint64_t>();
  tree.nodes_.resize(count);
  for (Node& n : tree.nodes_) {
    n.stats = read_stats(in);
    n.window = read_stats(in);
    n.feature_index = in.read<std::uint32_t>();
    n.threshold = in.read<double>();
    n.left = in.read<std::uint32_t>();
    n.right = in.read<std::uint32_t>();
    n.depth = in.read<std::uint32_t>();
    n.birth = in.read<std::uint64_t>();
    n.tests.resize(in.read<std::uint64_t>());
    for (SplitTest& t : n.tests) {
      t.feature_index = in.read<std::uint32_t>();
      t.threshold = in.read<double>();
      t.left_stats = read_stats(in);
      t.right_stats = read_stats(in);
    }
    n.warmup.resize(in.read<std::uint64_t>());
    for (double& v : n.warmup) v = in.read<double>();
  }
  for (const Node& n : tree.nodes_) {
    if (!n.is_leaf() && (n.left >= count || n.right >= count || n.feature_index >= tree.dim_)) {
      throw std::runtime_error("snapshot corrupt: node links");
    }
  }
  return tree;
}

}  // namespace rlorf
