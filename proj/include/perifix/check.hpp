#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "perifix/order.hpp"

namespace perifix {

enum class Verdict { Pass, Fail, Indeterminate };

std::string_view to_string(Verdict v);

// A sample point at which a check attained (one of) its worst margins.
struct Witness {
    std::string where;  // entry or face that was tested, e.g. "df2/dx1" or "x1=hi"
    double t = 0.0;
    Vec x;
    Vec u;
    double margin = 0.0;
};

// Outcome of one hypothesis check. worst_margin is signed: the check passes
// when worst_margin >= -eps.
struct CheckResult {
    std::string name;
    Verdict verdict = Verdict::Indeterminate;
    double worst_margin = 0.0;
    double eps = 0.0;
    std::vector<Witness> witnesses;
    std::int64_t samples_used = 0;
    std::uint64_t seed = 0;
    std::map<std::string, double> values;
    std::string message;

    bool passed() const noexcept { return verdict == Verdict::Pass; }
};

// Keeps the `capacity` smallest-margin witnesses seen so far.
class WitnessSet {
public:
    explicit WitnessSet(std::size_t capacity = 5) : capacity_(capacity) {}
    void offer(Witness w);
    std::vector<Witness> take() { return std::move(items_); }

private:
    std::size_t capacity_;
    std::vector<Witness> items_;
};

}  // namespace perifix
