#ifndef SPARSE_POLYAK_RANDOM_H_
#define SPARSE_POLYAK_RANDOM_H_

#include <cstdint>
#include <optional>

namespace sparse_polyak {

// xoshiro256** seeded through splitmix64, with Box-Muller normals. Output is
// identical across platforms and standard libraries, which std::mt19937 plus
// std::normal_distribution does not guarantee.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream `stream` of `seed`: the state is derived by hashing
  // (seed, stream), so consuming one stream never shifts another.
  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, bound), unbiased. bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);
  double normal();

 private:
  std::uint64_t s_[4];
  std::optional<double> spare_normal_;
};

// Fixed stream identifiers for instance generation.
enum class Stream : std::uint64_t {
  kDesign = 1,
  kSupport = 2,
  kValues = 3,
  kNoise = 4,
  kSensors = 5,
  kFactorLeft = 6,
  kFactorRight = 7,
};

inline Rng substream(std::uint64_t seed, Stream stream) {
  return Rng::substream(seed, static_cast<std::uint64_t>(stream));
}

}  // namespace sparse_polyak

#endif  // SPARSE_POLYAK_RANDOM_H_
