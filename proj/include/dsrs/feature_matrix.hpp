#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dsrs/matrix.hpp"

namespace dsrs {

/// Regression-ready predictor matrix with named columns, the response
/// vector, and the original record index of every retained row. Holds no
/// missing entries by construction.
struct FeatureMatrix {
    std::vector<std::string> feature_names;
    Matrix x;                      // n rows, p = feature_names.size() columns
    std::vector<double> y;         // response, length n
    std::vector<std::size_t> row_ids;  // strictly increasing source indices

    std::size_t n() const noexcept { return y.size(); }
    std::size_t p() const noexcept { return feature_names.size(); }

    /// Checks the structural invariants: consistent dimensions, finite
    /// cells, strictly increasing row ids, and n > p + 1. Throws on
    /// violation.
    void validate() const;

    /// Copy restricted to the named columns, in the given order.
    FeatureMatrix select(const std::vector<std::string>& features) const;
};

}  // namespace dsrs
