#ifndef TRACETAILS_RNG_HPP
#define TRACETAILS_RNG_HPP

#include <array>
#include <cstdint>

namespace tracetails {

// Philox 4x32-10 counter-based generator (Salmon et al., SC 2011).
// Every output block is a pure function of (key, counter), so any draw
// can be addressed directly without sequencing through a stream.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                              const std::array<std::uint32_t, 2>& key);
};

// Stateless random source keyed by a 64-bit seed. Draws are addressed by
// (stream, index): two callers with different stream tags never collide,
// and within a stream the index enumerates variates. Batching a request
// into chunks cannot change the values produced.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // 64 uniform bits for draw (stream, index, slot).
    std::uint64_t bits(std::uint64_t stream, std::uint64_t index, std::uint32_t slot = 0) const;

    // Uniform on the open interval (0, 1).
    double uniform(std::uint64_t stream, std::uint64_t index, std::uint32_t slot = 0) const;

    // Standard normal via inverse-CDF applied to one uniform.
    double normal(std::uint64_t stream, std::uint64_t index, std::uint32_t slot = 0) const;

    // One Gamma(shape, rate) variate. Rejection runs inside the draw's own
    // slot sequence, so the result is still a pure function of
    // (seed, stream, index).
    double gamma(double shape, double rate, std::uint64_t stream, std::uint64_t index) const;

  private:
    std::uint64_t seed_;
};

// Inverse of the standard normal CDF, accurate to full double precision.
double inverse_normal_cdf(double p);

} // namespace tracetails

#endif
