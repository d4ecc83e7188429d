#include "rfsel/rng.hpp"

namespace rfsel {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngSeed derive_seed(RngSeed parent, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(parent.value);
  for (std::uint64_t key : path) {
    h = splitmix64(h ^ splitmix64(key + 0x632be59bd9b4e019ULL));
  }
  return RngSeed{h};
}

}  // namespace rfsel
