#include "rlorf/cartpole.hpp"

#include <cmath>
#include <string>

#include "rlorf/error.hpp"

namespace rlorf {

CartPole::CartPole(std::uint64_t seed) : rng_(seed) {}

Observation CartPole::reset() {
  std::uniform_real_distribution<double> init(-0.05, 0.05);
  state_.x = init(rng_);
  state_.x_dot = init(rng_);
  state_.theta = init(rng_);
  state_.theta_dot = init(rng_);
  steps_ = 0;
  terminal_ = false;
  return state_.encode();
}

void CartPole::set_state(const CartPoleState& state) {
  state_ = state;
  steps_ = 0;
  terminal_ = false;
}

CartPoleState CartPole::integrate(const CartPoleState& s, double force) {
  const double cos_theta = std::cos(s.theta);
  const double sin_theta = std::sin(s.theta);
  const double temp = (force + kPoleMassLength * s.theta_dot * s.theta_dot * sin_theta) / kTotalMass;
  const double theta_acc =
      (kGravity * sin_theta - cos_theta * temp) /
      (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_theta * cos_theta / kTotalMass));
  const double x_acc = temp - kPoleMassLength * theta_acc * cos_theta / kTotalMass;

  CartPoleState next;
  next.x = s.x + kTau * s.x_dot;
  next.x_dot = s.x_dot + kTau * x_acc;
  next.theta = s.theta + kTau * s.theta_dot;
  next.theta_dot = s.theta_dot + kTau * theta_acc;
  return next;
}

bool CartPole::fallen(const CartPoleState& s) {
  return s.x < -kXLimit || s.x > kXLimit || s.theta < -kThetaLimit || s.theta > kThetaLimit;
}

StepResult CartPole::step(std::uint32_t action) {
  if (terminal_) throw UsageError("cartpole: step called on a finished episode; call reset()");
  if (action >= action_count()) throw UsageError("cartpole: invalid action " + std::to_string(action));

  state_ = integrate(state_, action == 1 ? kForce : -kForce);
  ++steps_;

  StepResult result;
  result.raw_reward = 1.0;
  result.shaped_reward = 1.0;
  if (fallen(state_)) {
    terminal_ = true;
    result.shaped_reward = kFallReward;
  } else if (steps_ >= kMaxSteps) {
    terminal_ = true;
  }
  result.terminal = terminal_;
  result.observation = state_.encode();
  return result;
}

}  // namespace rlorf
