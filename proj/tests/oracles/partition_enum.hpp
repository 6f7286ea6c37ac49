#pragma once

// Smallest summed window value over every partition of 1..n into `windows`
// contiguous windows, by enumerating the cut masks.

#include <algorithm>
#include <limits>

namespace oracle {

template <class Table>
double best_partition_objective(int n, int windows, const Table& table) {
  double best = std::numeric_limits<double>::infinity();
  // Choose windows - 1 cut points among n - 1 gaps.
  for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
    if (__builtin_popcount(mask) != windows - 1) continue;
    double total = 0.0;
    int first = 1;
    for (int g = 1; g <= n; ++g) {
      if (g == n || ((mask >> (g - 1)) & 1)) {
        total += table(first, g);
        first = g + 1;
      }
    }
    best = std::min(best, total);
  }
  return best;
}

}  // namespace oracle
