#ifndef PESTPULSE_RNG_HPP
#define PESTPULSE_RNG_HPP

#include <cstdint>
#include <random>

namespace pestpulse {

// Seeded generator with a hand-rolled Gaussian so streams are identical across
// standard libraries (std distributions are implementation-defined).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double gaussian();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pestpulse

#endif  // PESTPULSE_RNG_HPP
