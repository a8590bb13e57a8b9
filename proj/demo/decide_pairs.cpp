// Decides a handful of small pairs and prints one line per pair.

#include <cstdio>

#include "isosdp/isosdp.hpp"

int main() {
  using namespace isosdp;
  for (const auto& pr : named_pairs()) {
    const auto rep = decide(pr.g1, pr.g2);
    if (rep.value) {
      std::printf("%-10s n=%zu  value=%-12.8g %s", pr.name.c_str(), rep.n, *rep.value,
                  std::string(to_string(rep.verdict)).c_str());
    } else {
      std::printf("%-10s n=%zu  theta=%-12.8g %s", pr.name.c_str(), rep.n, rep.theta.value_or(0.0),
                  std::string(to_string(rep.verdict)).c_str());
    }
    if (rep.mapping && rep.verified) {
      std::printf("  mapping");
      for (auto v : rep.mapping->mapping()) std::printf(" %zu", v);
    }
    std::printf("\n");
  }
  return 0;
}
