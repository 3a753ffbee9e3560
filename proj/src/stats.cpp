#include <algorithm>

#include "platescreen/error.hpp"
#include "platescreen/mlselect.hpp"

namespace platescreen::ml {

Dataset Dataset::select(const std::vector<int>& columns) const {
    Dataset out;
    out.X.resize(X.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] < 0 || columns[j] >= X.cols())
            throw InvalidArgumentError("feature column out of range");
        out.X.col(static_cast<Eigen::Index>(j)) = X.col(columns[j]);
        if (!feature_names.empty()) out.feature_names.push_back(feature_names[columns[j]]);
    }
    out.y = y;
    out.class_names = class_names;
    return out;
}

Dataset Dataset::rows(const std::vector<int>& idx) const {
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
    out.y.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
        out.y.push_back(y[idx[i]]);
    }
    out.feature_names = feature_names;
    out.class_names = class_names;
    return out;
}

int Dataset::column(const std::string& name) const {
    for (std::size_t j = 0; j < feature_names.size(); ++j)
        if (feature_names[j] == name) return static_cast<int>(j);
    return -1;
}

std::vector<int> class_counts(const std::vector<int>& y, int n_classes) {
    std::vector<int> c(static_cast<std::size_t>(n_classes), 0);
    for (int v : y) {
        if (v < 0 || v >= n_classes) throw InvalidArgumentError("label index out of range");
        ++c[static_cast<std::size_t>(v)];
    }
    return c;
}

nlohmann::json RelevanceTable::to_json() const {
    nlohmann::json rows_j = nlohmann::json::array();
    for (const auto& r : rows) rows_j.push_back({{"features", r.features}, {"score", r.score}});
    return {{"rows", rows_j}, {"diagnostics", diagnostics}};
}

}  // namespace platescreen::ml
