#ifndef RIEMOC_CORE_RNG_HPP
#define RIEMOC_CORE_RNG_HPP

#include <cstdint>

namespace riemoc {

/// splitmix64: deterministic across platforms, used for certificate
/// sampling so identical config + seed reproduces identical streams.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// uniform in [-1, 1]
    double uniform_symmetric() { return 2.0 * uniform() - 1.0; }

private:
    std::uint64_t state_;
};

} // namespace riemoc

#endif
