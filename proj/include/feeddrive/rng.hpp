#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace feeddrive {

/// Deterministic random source. The raw engine is std::mt19937_64 (stable
/// across platforms by the standard); the distributions are hand-rolled
/// because the standard library's are implementation-defined and would break
/// bit-reproducibility of seeded runs across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t integer(std::uint64_t n) {
        return std::uint64_t((__uint128_t(engine_()) * n) >> 64);
    }

    /// Standard normal via Box-Muller. No cached spare: one draw consumes two
    /// uniforms, keeping the stream position independent of call history.
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1] so the log is finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

  private:
    std::mt19937_64 engine_;
};

/// splitmix64 step, used to derive independent stream seeds from a master
/// seed without correlated low bits.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace feeddrive
