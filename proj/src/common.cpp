#include "wordprobe/common.hpp"

#include <limits>
#include <numeric>

namespace wordprobe {

std::uint64_t Rng::bounded(std::uint64_t bound) {
  if (bound == 0) throw Error("Rng::bounded: bound must be positive");
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t draw = engine_();
    if (draw < limit) return draw % bound;
  }
}

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  return order;
}

}  // namespace wordprobe
