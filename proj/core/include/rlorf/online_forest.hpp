#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rlorf/online_tree.hpp"
#include "rlorf/rng.hpp"

namespace rlorf {

class BinaryWriter;
class BinaryReader;

struct ForestConfig {
  std::uint32_t m_init = 100;
  std::uint32_t m_max = 200;
  double phi = 1.0 / 5000.0;  // trees older than 1/phi samples may be discarded
  std::uint32_t lambda_window = 50;
  double mu = 0.01;
  double poisson_rate = 1.0;
  TreeConfig tree_config;

  void validate() const;
  bool operator==(const ForestConfig&) const = default;
};

// Fixed-capacity window of out-of-bag error terms with an O(1) mean.
class OobeWindow {
 public:
  explicit OobeWindow(std::uint32_t capacity = 1) : values_(capacity, 0.0) {}

  void push(double error);
  double mean() const { return size_ == 0 ? 0.0 : sum_ / static_cast<double>(size_); }
  std::uint32_t size() const { return size_; }
  std::uint32_t capacity() const { return static_cast<std::uint32_t>(values_.size()); }
  // Oldest to newest.
  std::vector<double> values() const;
  void clear();
  bool operator==(const OobeWindow&) const = default;

  void save(BinaryWriter& out) const;
  static OobeWindow load(BinaryReader& in);

 private:
  std::vector<double> values_;
  std::uint32_t head_ = 0;  // next slot to overwrite
  std::uint32_t size_ = 0;
  double sum_ = 0.0;
};

// One normalized absolute error term, min(|(y - m) / (y + mu)|, 1).
double oobe_term(double y, double prediction, double mu);

struct ForestTree {
  OnlineTree tree;
  std::uint64_t age = 0;  // samples ingested, counting Poisson multiplicity
  OobeWindow oobe_window;

  double oobe() const { return oobe_window.mean(); }
  bool operator==(const ForestTree&) const = default;
};

class OnlineForest {
 public:
  OnlineForest(ForestConfig config, std::uint32_t dim, std::uint64_t seed);

  // Online bagging step followed by one replacement check.
  void update(std::span<const double> x, double y);

  // Unweighted mean of the tree predictions.
  double predict(std::span<const double> x) const;

  // Replaces at most one aged tree, with probability equal to its OOBE. Returns 0 or 1.
  std::size_t maybe_replace_trees();

  // Duplicates the lowest-OOBE tree until the forest holds m_max trees.
  void expand();

  std::span<const ForestTree> trees() const { return trees_; }
  std::size_t size() const { return trees_.size(); }
  const ForestConfig& config() const { return config_; }
  std::uint32_t dim() const { return dim_; }
  std::uint64_t replacements() const { return replacements_; }
  // Poisson draws made by update() so far, and how many of them were zero.
  std::uint64_t bagging_draws() const { return bagging_draws_; }
  std::uint64_t zero_draws() const { return zero_draws_; }
  std::size_t best_tree_index() const;

  // Test hook: route one sample through a single tree with a forced Poisson count.
  void ingest_tree(std::size_t index, std::span<const double> x, double y, std::uint32_t k);

  bool operator==(const OnlineForest&) const = default;

  void save(std::ostream& os) const;
  static OnlineForest load(std::istream& is);
  void save(BinaryWriter& out) const;
  static OnlineForest load(BinaryReader& in);

 private:
  OnlineForest() = default;
  ForestTree fresh_tree();
  void check_input(std::span<const double> x) const;

  ForestConfig config_;
  std::uint32_t dim_ = 0;
  std::vector<ForestTree> trees_;
  std::uint64_t master_seed_ = 0;
  std::uint64_t next_stream_ = 0;
  std::uint64_t replacements_ = 0;
  std::uint64_t bagging_draws_ = 0;
  std::uint64_t zero_draws_ = 0;
  Rng rng_;
};

}  // namespace rlorf
