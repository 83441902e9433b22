#include "synworld/random.hpp"

#include <sstream>

#include "synworld/error.hpp"

namespace synworld {

std::string rng_state(const Rng& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

void set_rng_state(Rng& rng, const std::string& state) {
  std::istringstream in(state);
  Rng restored;
  in >> restored;
  if (in.fail()) throw FormatError("rng_state: unreadable engine state");
  rng = restored;
}

}  // namespace synworld
