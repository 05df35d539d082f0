#ifndef CONICAL_RNG_HPP
#define CONICAL_RNG_HPP

#include <cstdint>

namespace conical {

// Counter-based generator: every draw is a pure hash of
// (seed, stream, counter), so per-particle streams are reproducible no
// matter how work is scheduled across threads.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    double uniform() { return to_unit(next()); }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  private:
    std::uint64_t seed_, stream_;
    std::uint64_t counter_ = 0;

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() {
        std::uint64_t h = mix(seed_ ^ mix(stream_ ^ mix(counter_++)));
        return h;
    }

    static double to_unit(std::uint64_t v) {
        return double(v >> 11) * 0x1.0p-53;
    }
};

}  // namespace conical

#endif
