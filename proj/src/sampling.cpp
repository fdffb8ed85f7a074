#include "perifix/sampling.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace perifix {

namespace {

constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

double radical_inverse(std::uint64_t k, unsigned base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (k > 0) {
        r += f * static_cast<double>(k % base);
        k /= base;
        f *= inv;
    }
    return r;
}

}  // namespace

QuasiRandom::QuasiRandom(std::size_t dim, std::uint64_t seed) : shift_(dim) {
    if (dim > std::size(kPrimes)) throw std::invalid_argument("QuasiRandom: dimension too large");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& s : shift_) s = u(rng);
}

std::vector<double> QuasiRandom::at(std::uint64_t k) const {
    std::vector<double> p(shift_.size());
    for (std::size_t d = 0; d < p.size(); ++d) {
        double v = radical_inverse(k + 1, kPrimes[d]) + shift_[d];
        p[d] = v - std::floor(v);
    }
    return p;
}

std::vector<double> QuasiRandom::next() { return at(index_++); }

}  // namespace perifix
