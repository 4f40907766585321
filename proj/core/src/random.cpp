#include "cmaopt/random.hpp"

#include <cmath>

namespace cmaopt {

double Rng::normal() {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace cmaopt
