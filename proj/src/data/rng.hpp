#ifndef BHO_DATA_RNG_HPP
#define BHO_DATA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace bho::data {

/**
 * Seedable generator with fixed output mapping. The engine is std::mt19937_64
 * (its output sequence is pinned by the standard); uniform and normal draws
 * are mapped here rather than through std::*_distribution, whose sequences
 * are implementation defined. Normals use the Marsaglia polar method, so runs
 * reproduce bit-for-bit for a given seed.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), rejection sampled to avoid modulo bias.
    std::uint64_t uniform_int(std::uint64_t n)
    {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t draw;
        do
        {
            draw = engine_();
        } while (draw >= limit);
        return draw % n;
    }

    /// Standard normal draw.
    double normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double u, v, q;
        do
        {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            q = u * u + v * v;
        } while (q >= 1.0 || q == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(q) / q);
        spare_ = v * scale;
        has_spare_ = true;
        return u * scale;
    }

    /// Fisher-Yates shuffle of indices 0..n-1.
    template <typename T>
    void shuffle(std::vector<T>& values)
    {
        for (std::size_t i = values.size(); i > 1; i--)
        {
            std::swap(values[i - 1], values[uniform_int(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace bho::data

#endif
