#include "rlorf/online_forest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "rlorf/error.hpp"
#include "rlorf/serialize.hpp"

namespace rlorf {

namespace {

constexpr std::uint32_t kForestMagic = 0x524C4F46;  // "RLOF"
constexpr std::uint32_t kForestVersion = 1;

}  // namespace

void ForestConfig::validate() const {
  if (m_init == 0) throw ConfigError("m_init must be positive");
  if (m_init > m_max) {
    throw ConfigError("m_init (" + std::to_string(m_init) + ") must not exceed m_max (" +
                      std::to_string(m_max) + ")");
  }
  if (!(phi > 0.0) || !std::isfinite(phi)) throw ConfigError("phi must be positive");
  if (lambda_window == 0) throw ConfigError("lambda_window must be positive");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("mu must be positive");
  if (!(poisson_rate > 0.0) || !std::isfinite(poisson_rate)) throw ConfigError("poisson_rate must be positive");
  tree_config.validate();
}

void OobeWindow::push(double error) {
  const auto cap = capacity();
  if (size_ < cap) {
    ++size_;
  } else {
    sum_ -= values_[head_];
  }
  values_[head_] = error;
  sum_ += error;
  head_ = (head_ + 1) % cap;
  if (head_ == 0 && size_ == cap) {
    // resynchronize the running sum once per lap
    sum_ = 0.0;
    for (double v : values_) sum_ += v;
  }
}

std::vector<double> OobeWindow::values() const {
  std::vector<double> out;
  out.reserve(size_);
  const auto cap = capacity();
  const std::uint32_t start = size_ < cap ? 0 : head_;
  for (std::uint32_t i = 0; i < size_; ++i) out.push_back(values_[(start + i) % cap]);
  return out;
}

void OobeWindow::clear() {
  std::fill(values_.begin(), values_.end(), 0.0);
  head_ = 0;
  size_ = 0;
  sum_ = 0.0;
}

void OobeWindow::save(BinaryWriter& out) const {
  out.write<std::uint32_t>(capacity());
  out.write(head_);
  out.write(size_);
  out.write(sum_);
  for (double v : values_) out.write(v);
}

OobeWindow OobeWindow::load(BinaryReader& in) {
  const auto cap = in.read<std::uint32_t>();
  if (cap == 0) throw std::runtime_error("snapshot corrupt: oobe window capacity");
  OobeWindow w(cap);
  w.head_ = in.read<std::uint32_t>();
  w.size_ = in.read<std::uint32_t>();
  w.sum_ = in.read<double>();
  if (w.head_ >= cap || w.size_ > cap) throw std::runtime_error("snapshot corrupt: oobe window cursor");
  for (double& v : w.values_) v = in.read<double>();
  return w;
}

double oobe_term(double y, double prediction, double mu) {
  const double num = y - prediction;
  if (num == 0.0) return 0.0;
  const double ratio = std::abs(num / (y + mu));
  return std::isnan(ratio) ? 1.0 : std::min(ratio, 1.0);
}

OnlineForest::OnlineForest(ForestConfig config, std::uint32_t dim, std::uint64_t seed)
    : config_(std::move(config)), dim_(dim), master_seed_(seed), rng_(derive_seed(seed, 0)) {
  config_.validate();
  if (dim_ == 0) throw ConfigError("forest dimension must be positive");
  trees_.reserve(config_.m_max);
  for (std::uint32_t i = 0; i < config_.m_init; ++i) trees_.push_back(fresh_tree());
}

ForestTree OnlineForest::fresh_tree() {
  const std::uint64_t stream = ++next_stream_;
  return ForestTree{OnlineTree(config_.tree_config, dim_, derive_seed(master_seed_, stream)), 0,
                    OobeWindow(config_.lambda_window)};
}

void OnlineForest::check_input(std::span<const double> x) const {
  if (x.size() != dim_) throw InputError("feature vector dimension mismatch");
  for (double v : x) {
    if (!std::isfinite(v)) throw InputError("non-finite feature value");
  }
}

void OnlineForest::update(std::span<const double> x, double y) {
  check_input(x);
  if (!std::isfinite(y)) throw InputError("non-finite target");
  std::poisson_distribution<std::uint32_t> poisson(config_.poisson_rate);
  for (ForestTree& t : trees_) {
    const std::uint32_t k = poisson(rng_);
    ++bagging_draws_;
    if (k > 0) {
      for (std::uint32_t i = 0; i < k; ++i) t.tree.update_unchecked(x, y);
      t.age += k;
    } else {
      ++zero_draws_;
      t.oobe_window.push(oobe_term(y, t.tree.predict_unchecked(x), config_.mu));
    }
  }
  maybe_replace_trees();
}

void OnlineForest::ingest_tree(std::size_t index, std::span<const double> x, double y,
                               std::uint32_t k) {
  ForestTree& t = trees_.at(index);
  if (k > 0) {
    for (std::uint32_t i = 0; i < k; ++i) t.tree.update(x, y);
    t.age += k;
  } else {
    t.oobe_window.push(oobe_term(y, t.tree.predict(x), config_.mu));
  }
}

double OnlineForest::predict(std::span<const double> x) const {
  check_input(x);
  double sum = 0.0;
  for (const ForestTree& t : trees_) sum += t.tree.predict_unchecked(x);
  return sum / static_cast<double>(trees_.size());
}

std::size_t OnlineForest::maybe_replace_trees() {
  const double min_age = 1.0 / config_.phi;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    if (static_cast<double>(trees_[i].age) <= min_age) continue;
    if (unit(rng_) < trees_[i].oobe()) candidates.push_back(i);
  }
  if (candidates.empty()) return 0;
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  trees_[candidates[pick(rng_)]] = fresh_tree();
  ++replacements_;
  return 1;
}

std::size_t OnlineForest::best_tree_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < trees_.size(); ++i) {
    if (trees_[i].oobe() < trees_[best].oobe()) best = i;
  }
  return best;
}

void OnlineForest::expand() {
  if (trees_.size() >= config_.m_max) return;
  const std::size_t best = best_tree_index();
  const OnlineTree source = trees_[best].tree;
  while (trees_.size() < config_.m_max) {
    ForestTree copy{source, 0, OobeWindow(config_.lambda_window)};
    copy.tree.reseed(derive_seed(master_seed_, ++next_stream_));
    trees_.push_back(std::move(copy));
  }
}

void OnlineForest::save(BinaryWriter& out) const {
  out.write(kForestMagic);
  out.write(kForestVersion);
  out.write(config_.m_init);
  out.write(config_.m_max);
  out.write(config_.phi);
  out.write(config_.lambda_window);
  out.write(config_.mu);
  out.write(config_.poisson_rate);
  out.write(dim_);
  out.write(master_seed_);
  out.write(next_stream_);
  out.write(replacements_);
  out.write(bagging_draws_);
  out.write(zero_draws_);
  out.write_rng(rng_);
  out.write<std::uint64_t>(trees_.size());
  for (const ForestTree& t : trees_) {
    t.tree.save(out);
    out.write(t.age);
    t.oobe_window.save(out);
  }
}

OnlineForest OnlineForest::load(BinaryReader& in) {
  in.expect_tag(kForestMagic, "forest header");
  if (const auto version = in.read<std::uint32_t>(); version != kForestVersion) {
    throw std::runtime_error("unsupported forest snapshot version " + std::to_string(version));
  }
  OnlineForest f;
  f.config_.m_init = in.read<std::uint32_t>();
  f.config_.m_max = in.read<std::uint32_t>();
  f.config_.phi = in.read<double>();
  f.config_.lambda_window = in.read<std::uint32_t>();
  f.config_.mu = in.read<double>();
  f.config_.poisson_rate = in.read<double>();
  f.dim_ = in.read<std::uint32_t>();
  f.master_seed_ = in.read<std::uint64_t>();
  f.next_stream_ = in.read<std::uint64_t>();
  f.replacements_ = in.read<std::uint64_t>();
  f.bagging_draws_ = in.read<std::uint64_t>();
  f.zero_draws_ = in.read<std::uint64_t>();
  f.rng_ = in.read_rng();
  const auto count = in.read<std::uint64_t>();
  if (count == 0 || count > f.config_.m_max) throw std::runtime_error("snapshot corrupt: tree count");
  f.trees_.reserve(f.config_.m_max);
  for (std::uint64_t i = 0; i < count; ++i) {
    OnlineTree tree = OnlineTree::load(in);
    if (i == 0) f.config_.tree_config = tree.config();
    const auto age = in.read<std::uint64_t>();
    OobeWindow window = OobeWindow::load(in);
    if (window.capacity() != f.config_.lambda_window) throw std::runtime_error("snapshot corrupt: oobe window");
    f.trees_.push_back(ForestTree{std::move(tree), age, std::move(window)});
  }
  f.config_.validate();
  return f;
}

void OnlineForest::save(std::ostream& os) const {
  BinaryWriter out(os);
  save(out);
}

OnlineForest OnlineForest::load(std::istream& is) {
  BinaryReader in(is);
  return load(in);
}

}  // namespace rlorf
