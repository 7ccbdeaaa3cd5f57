#ifndef MMO_RANDOM_HPP
#define MMO_RANDOM_HPP

#include <cstdint>
#include <random>

namespace mmo {

inline constexpr auto splitmix64(std::uint64_t x) noexcept -> std::uint64_t
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

// Maps 64 random bits to [0, 1) using the top 53 bits.
inline constexpr auto to_unit(std::uint64_t bits) noexcept -> double
{
    return static_cast<double>(bits >> 11U) * 0x1.0p-53;
}

// Seeded generator with platform-independent derived distributions. The
// std:: distributions are implementation-defined, so they are avoided here to
// keep seeded runs identical across standard libraries.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr auto min() noexcept -> result_type { return std::mt19937_64::min(); }
    static constexpr auto max() noexcept -> result_type { return std::mt19937_64::max(); }
    auto operator()() -> result_type { return engine_(); }

    // Uniform integer in [0, n); n must be positive. Rejection sampling keeps it unbiased.
    auto index(std::uint64_t n) -> std::uint64_t
    {
        std::uint64_t const limit = n * (~std::uint64_t{0} / n);
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % n;
    }

    auto uniform() -> double { return to_unit(engine_()); }

    auto uniform(double lo, double hi) -> double { return lo + (hi - lo) * uniform(); }

    auto bernoulli(double p) -> bool { return uniform() < p; }

    auto coin() -> bool { return (engine_() >> 63U) != 0U; }

private:
    std::mt19937_64 engine_;
};

} // namespace mmo

#endif
