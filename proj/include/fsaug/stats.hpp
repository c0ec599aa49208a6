#pragma once

#include "fsaug/matrix.hpp"

namespace fsaug {

// Per-element standard deviations across a set of context vectors, one value
// per context dimension. All entries are >= 0.
using SigmaVector = NumericVector;

// Population (divide-by-N) standard deviation of each column. Rows are
// context vectors, one per sample. Throws InsufficientDataError for fewer
// than 2 rows.
SigmaVector per_element_std(const NumericMatrix& contexts);

// L2 norm of a - b. Throws DimensionError on length mismatch.
double euclidean_distance(const NumericVector& a, const NumericVector& b);

// Mean and sample (divide-by-(n-1)) standard deviation, the convention used
// for reported error bars.
double mean_of(const std::vector<double>& values);
double sample_std(const std::vector<double>& values);

}  // namespace fsaug
