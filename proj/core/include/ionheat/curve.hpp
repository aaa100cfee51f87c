#pragma once

#include <vector>

#include "ionheat/errors.hpp"

namespace ionheat {

/// Time series of a motional observable with pointwise asymmetric 1-sigma
/// bounds. Used for nbar(t) estimates and model curves with uncertainty
/// bands.
struct HeatingCurve {
    std::vector<double> times;   // s, strictly increasing
    std::vector<double> values;
    std::vector<double> ci_low;
    std::vector<double> ci_high;

    void validate() const {
        const std::size_t n = times.size();
        if (values.size() != n || ci_low.size() != n || ci_high.size() != n)
            throw DomainError("HeatingCurve: mismatched column lengths");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(times[i] < times[i + 1]))
                throw DomainError("HeatingCurve: times must strictly increase");
        for (std::size_t i = 0; i < n; ++i)
            if (!(ci_low[i] <= values[i] && values[i] <= ci_high[i]))
                throw DomainError("HeatingCurve: interval must bracket the value");
    }
};

}  // namespace ionheat
