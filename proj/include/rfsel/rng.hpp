#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rfsel {

using Rng = std::mt19937_64;

struct RngSeed {
  std::uint64_t value = 0;

  friend bool operator==(RngSeed, RngSeed) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent child seed from a parent seed and a path of
// integer keys (tree index, run index, ...). Pure function of its inputs.
RngSeed derive_seed(RngSeed parent, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(RngSeed seed) { return Rng(seed.value); }

// Stream tags so that differently-purposed children of the same parent
// never collide.
namespace stream {
inline constexpr std::uint64_t kTree = 0x7472656500000001ULL;
inline constexpr std::uint64_t kPermutation = 0x7065726d00000002ULL;
inline constexpr std::uint64_t kRun = 0x72756e0000000003ULL;
inline constexpr std::uint64_t kImportance = 0x76690000000004ULL;
inline constexpr std::uint64_t kNested = 0x6e65737400000005ULL;
inline constexpr std::uint64_t kStepwise = 0x7374657000000006ULL;
inline constexpr std::uint64_t kData = 0x6461746100000007ULL;
inline constexpr std::uint64_t kTestData = 0x7465737400000008ULL;
inline constexpr std::uint64_t kFold = 0x666f6c6400000009ULL;
inline constexpr std::uint64_t kCell = 0x63656c6c0000000aULL;
inline constexpr std::uint64_t kEval = 0x6576616c0000000bULL;
inline constexpr std::uint64_t kReplicate = 0x7265706c0000000cULL;
}  // namespace stream

}  // namespace rfsel
