#pragma once

#include <cstdint>
#include <numbers>

#include "rlorf/environment.hpp"
#include "rlorf/rng.hpp"

namespace rlorf {

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;

  Observation encode() const { return {x, x_dot, theta, theta_dot}; }
  bool operator==(const CartPoleState&) const = default;
};

// Inverted pendulum on a cart, explicit Euler. Actions 0 = push left, 1 = push right.
// Raw reward is +1 every step; the shaped reward replaces it with -1000 on a fall.
class CartPole final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kTotalMass = kCartMass + kPoleMass;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kPoleMassLength = kPoleMass * kHalfLength;
  static constexpr double kForce = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kThetaLimit = 12.0 * 2.0 * std::numbers::pi / 360.0;
  static constexpr double kXLimit = 2.4;
  static constexpr std::uint32_t kMaxSteps = 500;
  static constexpr double kFallReward = -1000.0;

  explicit CartPole(std::uint64_t seed);

  Observation reset() override;
  StepResult step(std::uint32_t action) override;
  std::uint32_t action_count() const override { return 2; }
  std::uint32_t observation_dim() const override { return 4; }
  std::string name() const override { return "cartpole"; }

  const CartPoleState& state() const { return state_; }
  // Places the system in an arbitrary state and starts a fresh episode from it.
  void set_state(const CartPoleState& state);
  std::uint32_t steps() const { return steps_; }
  bool terminal() const { return terminal_; }

  // One Euler step of the equations of motion under a horizontal force.
  static CartPoleState integrate(const CartPoleState& s, double force);
  static bool fallen(const CartPoleState& s);

 private:
  Rng rng_;
  CartPoleState state_;
  std::uint32_t steps_ = 0;
  bool terminal_ = true;
};

}  // namespace rlorf
