// Draws Strauss samples on the unit square with and without swap moves and
// prints the point counts and the number of backward events each run needed.

#include <cstdio>

#include "bdswap/dcftp.hpp"

int main() {
  const bdswap::Window window = bdswap::Window::unit_square();
  const bdswap::StraussModel model(100.0, 0.5, 0.1);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto no_swap = bdswap::dominated_cftp(model, window, 0.0, seed);
    const auto swap = bdswap::dominated_cftp(model, window, 1.0, seed);
    std::printf("seed %llu: no-swap %zu points / %zu events, swap %zu points / %zu events\n",
                static_cast<unsigned long long>(seed), no_swap.sample.size(), no_swap.events, swap.sample.size(),
                swap.events);
  }
}
