#ifndef BBSIM_RNG_HPP
#define BBSIM_RNG_HPP

#include <cstdint>

namespace bbsim {

/// splitmix64 step. Used everywhere instead of <random> engines so that
/// traces are byte-identical across standard library implementations.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive an independent stream seed from a master seed. `stream` tags the
/// consumer (per-tick sampling, per-event regulation, ...), `index` counts
/// within the stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
    std::uint64_t s = master ^ (0xa0761d6478bd642fULL * (stream + 1));
    splitmix64(s);
    s ^= 0xe7037ed1a0b428dbULL * (index + 1);
    splitmix64(s);
    return s;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64(state_); }

    /// Uniform draw in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform draw in [-1, 1].
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  private:
    std::uint64_t state_;
};

} // namespace bbsim

#endif
