#include "mtdea/rng.hpp"

#include "mtdea/errors.hpp"

namespace mtdea {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t substream_seed(std::uint64_t seed, std::string_view name, std::uint64_t index) {
    std::uint64_t h = splitmix64(seed ^ fnv1a(name));
    return splitmix64(h ^ splitmix64(index));
}

std::mt19937_64 substream(std::uint64_t seed, std::string_view name, std::uint64_t index) {
    return std::mt19937_64(substream_seed(seed, name, index));
}

std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) throw ContractViolation("rand_below: n must be positive");
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

double rand_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double rand_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * rand_unit(rng);
}

}  // namespace mtdea
