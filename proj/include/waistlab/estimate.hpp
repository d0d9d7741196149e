#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace waistlab {

struct EstimateReport {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    std::string method;
    std::vector<std::pair<std::string, double>> diagnostics;

    double diagnostic(const std::string& key, double fallback = 0.0) const {
        for (const auto& [k, v] : diagnostics)
            if (k == key) return v;
        return fallback;
    }
};

}  // namespace waistlab
