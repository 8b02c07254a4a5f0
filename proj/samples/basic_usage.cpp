// Build a tree with both update algorithms, then check it and print its shape statistics.

#include <cstdio>
#include <string>

#include "gcb/gcb.hpp"

int main() {
  gcb::tree<std::string> t(0.72, 0.5);

  for (int i = 0; i < 1000; ++i) t.insert_bu("key" + std::to_string(i));
  for (int i = 0; i < 1000; i += 2) t.erase_td("key" + std::to_string(i));
  t.insert_td("key1");  // already present: nothing changes

  const auto report = gcb::validate(t);
  const auto stats = gcb::compute_stats(t);
  const auto bound = gcb::theoretical_bounds(stats.n_nodes, t.params());

  std::printf("nodes %llu, height %lld (bound %.2f), external path length %llu (bound %.1f)\n",
              static_cast<unsigned long long>(stats.n_nodes), static_cast<long long>(stats.height),
              bound.height, static_cast<unsigned long long>(stats.external_path_length),
              bound.external_path_length);
  std::printf("rotations %llu, violations %zu\n",
              static_cast<unsigned long long>(t.counters().total), report.violations.size());
  return report.ok() && t.size() == 500 && t.contains("key999") && !t.contains("key998") ? 0 : 1;
}
