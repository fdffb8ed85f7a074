#pragma once

#include <cstdint>
#include <vector>

namespace perifix {

// Halton points in [0,1)^dim with a seeded Cranley-Patterson rotation.
// Identical (dim, seed) pairs give identical sequences.
class QuasiRandom {
public:
    QuasiRandom(std::size_t dim, std::uint64_t seed);

    std::vector<double> next();
    // k-th point of the sequence, independent of next() state.
    std::vector<double> at(std::uint64_t k) const;

    std::size_t dim() const noexcept { return shift_.size(); }

private:
    std::vector<double> shift_;
    std::uint64_t index_ = 0;
};

}  // namespace perifix
