#include "rlorf/environment.hpp"

#include "rlorf/blackjack.hpp"
#include "rlorf/cartpole.hpp"
#include "rlorf/error.hpp"

namespace rlorf {

std::unique_ptr<Environment> make_environment(const std::string& name, std::uint64_t seed) {
  if (name == "blackjack") return std::make_unique<Blackjack>(seed);
  if (name == "cartpole") return std::make_unique<CartPole>(seed);
  throw ConfigError("unknown environment '" + name + "' (expected blackjack or cartpole)");
}

}  // namespace rlorf
