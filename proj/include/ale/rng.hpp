#pragma once

#include <cstdint>
#include <initializer_list>

namespace ale {

// Counter-based splittable generator. A stream is a 64-bit key; drawing value
// n applies the splitmix64 finalizer to key + n*phi. Streams derived through
// `stream()` are independent for distinct paths, so replicas can run on any
// number of threads with bit-identical output.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(mix(key ^ 0x9e3779b97f4a7c15ull)) {}

    static std::uint64_t derive(std::uint64_t key, std::uint64_t component) {
        return mix(mix(key + 0x632be59bd9b4e019ull) ^ mix(component + 0x9e3779b97f4a7c15ull));
    }

    CounterRng stream(std::initializer_list<std::uint64_t> path) const {
        std::uint64_t k = key_;
        for (std::uint64_t p : path) k = derive(k, p);
        return CounterRng(k);
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

    // uniform in [0, 1) with 53 random bits
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    std::uint64_t key() const { return key_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace ale
