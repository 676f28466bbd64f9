#include "kronldp/rng.hpp"

#include <cmath>
#include <numbers>

namespace kronldp {

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_words(std::initializer_list<std::uint64_t> words)
{
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto w : words) h = mix64(h ^ mix64(w + 0x632be59bd9b4e019ULL));
    return h;
}

double to_unit_open(std::uint64_t bits)
{
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double normal_at(std::uint64_t key, std::uint64_t counter)
{
    const std::uint64_t base = mix64(key ^ mix64(counter));
    const double u1 = to_unit_open(mix64(base));
    const double u2 = to_unit_open(mix64(base + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double CounterRng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

}  // namespace kronldp
