#ifndef BHPFIT_RANDOM_H_
#define BHPFIT_RANDOM_H_

#include <cstdint>
#include <random>

namespace bhpfit {

// Deterministic stream of uniforms in the open interval (0, 1). Built on
// mt19937_64, whose output sequence is fixed by the standard, so the stream
// is identical across platforms for a given seed.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    // 53 random bits, offset by half an ulp so neither 0 nor 1 is produced.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t next_bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bhpfit

#endif  // BHPFIT_RANDOM_H_
