#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace eit {

// Derive a component seed from the global seed and a component name so that
// every stochastic stage (noise, GA, disturbance, ...) gets an independent,
// reproducible stream. FNV-1a over the name, mixed with the seed via
// splitmix64 finalization.
inline std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view component) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : component) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::uint64_t z = global_seed + 0x9e3779b97f4a7c15ull + h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// mt19937_64 engine (bit-exact across platforms by the standard) with
// hand-rolled uniform/normal draws; std:: distributions are implementation
// defined and would break cross-compiler reproducibility of artifacts.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        // modulo bias is < 2^-40 for the population sizes used here
        return engine_() % n;
    }

    // standard normal via Box-Muller, spare value cached
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace eit
