#include "diffhash/rng.hpp"

#include <cmath>

namespace diffhash {

// Marsaglia polar variant; the second deviate is discarded so the stream
// position depends only on the number of calls.
double Rng::normal() {
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

}  // namespace diffhash
