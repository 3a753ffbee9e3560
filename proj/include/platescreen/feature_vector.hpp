#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace platescreen {

inline constexpr double kGap = std::numeric_limits<double>::quiet_NaN();

inline bool is_gap(double v) noexcept { return std::isnan(v); }

/// Named feature values; an entry is invalid when its formula was undefined
/// for the input (stored as NaN so vectors stay aligned).
struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;

    void add(std::string name, double value) {
        names.push_back(std::move(name));
        values.push_back(value);
    }

    void append(const FeatureVector& other) {
        names.insert(names.end(), other.names.begin(), other.names.end());
        values.insert(values.end(), other.values.begin(), other.values.end());
    }

    std::size_t size() const noexcept { return values.size(); }
    bool valid(std::size_t i) const noexcept { return !is_gap(values[i]); }

    std::optional<double> get(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) {
                if (!valid(i)) return std::nullopt;
                return values[i];
            }
        return std::nullopt;
    }

    bool contains(const std::string& name) const {
        for (const auto& n : names)
            if (n == name) return true;
        return false;
    }
};

}  // namespace platescreen
