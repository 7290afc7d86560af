#pragma once

#include <cstdint>

namespace branchlab::rng {

std::uint64_t mix64(std::uint64_t z);
// Stream identifier for a (major, minor) pair such as (path, generation).
std::uint64_t derive_stream(std::uint64_t major, std::uint64_t minor);

// Stateless generator: the value for (seed, stream, counter) is a fixed hash,
// so any draw can be reproduced independently of the order of evaluation.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter = 0);

    std::uint64_t next();
    double uniform();  // [0, 1), 53 bits
    std::uint64_t counter() const { return counter_; }

    static std::uint64_t at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace branchlab::rng
