#pragma once

#include <cstdint>
#include <vector>

namespace nlqc {

// Seedable, splittable pseudo-random stream (xoshiro256** over splitmix64
// key expansion). Streams derived with split() are statistically
// independent and reproducible regardless of how much the parent has been
// consumed. All distributions are implemented locally so that sequences
// are identical across platforms and standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  // Child stream identified by (this stream, child index).
  RngStream split(std::uint64_t child) const;

  std::uint64_t next_u64();
  double uniform();              // [0, 1), 53-bit resolution
  int uniform_int(int n);        // uniform over {0, ..., n-1}
  double normal();               // standard normal, Marsaglia polar
  // Index sampled proportionally to nonnegative weights (need not sum to 1).
  int sample_discrete(const std::vector<double>& weights);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_ = 0, stream_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nlqc
