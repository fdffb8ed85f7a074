#include "perifix/check.hpp"

#include <algorithm>

namespace perifix {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

void WitnessSet::offer(Witness w) {
    if (items_.size() == capacity_ && !(w.margin < items_.back().margin)) return;
    auto pos = std::upper_bound(items_.begin(), items_.end(), w.margin,
                                [](double m, const Witness& x) { return m < x.margin; });
    items_.insert(pos, std::move(w));
    if (items_.size() > capacity_) items_.pop_back();
}

}  // namespace perifix
