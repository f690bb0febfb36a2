#include "mgcc/random.hpp"

#include <cmath>

namespace mgcc {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_id) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : stream_id) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(master ^ splitmix64(h));
}

double Rng::exponential(double mean) noexcept
{
    return -mean * std::log1p(-uniform());
}

}  // namespace mgcc
