#pragma once

#include <cstdint>

namespace vslab {

// Counter-based splittable RNG ("splitmix64-v1", recorded in every output
// header). The generator state is a plain counter; each output is a bijective
// 64-bit mix of the counter, so distinct streams never share outputs unless
// their counter sequences collide.
//
// Per-trial stream derivation (the documented mixing function):
//   stream(master, i).counter0 = mix64(master ^ mix64(GOLDEN * (i + 1)))
// with GOLDEN = 0x9E3779B97F4A7C15 and mix64 = the splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class RngStream {
public:
    explicit RngStream(std::uint64_t counter0 = 0) : counter_(counter0) {}

    std::uint64_t next_u64() {
        counter_ += 0x9E3779B97F4A7C15ull;
        return mix64(counter_);
    }

    // Uniform in [0,1) with 53-bit resolution; used only where the consumer
    // explicitly wants a float (thresholded draws use raw u64 instead).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t counter_;
};

// Seed (= starting counter) of the index-th stream under a master seed; the
// run_* entry points take such a seed and start their stream at it.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(0x9E3779B97F4A7C15ull * (index + 1)));
}

inline RngStream derive_stream(std::uint64_t master, std::uint64_t index) {
    return RngStream(derive_seed(master, index));
}

inline const char* rng_id() { return "splitmix64-v1"; }

} // namespace vslab
