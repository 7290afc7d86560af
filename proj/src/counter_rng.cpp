#include "branchlab/counter_rng.hpp"

namespace branchlab::rng {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_stream(std::uint64_t major, std::uint64_t minor) {
    return mix64(mix64(major) ^ (minor * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL));
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter)
    : key_(mix64(seed ^ mix64(stream))), counter_(counter) {}

std::uint64_t CounterRng::next() {
    return mix64(key_ + kGolden * (counter_++));
}

double CounterRng::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return CounterRng(seed, stream, counter).next();
}

}  // namespace branchlab::rng
