// Reference classifiers the neural model is compared against: exact k-nearest
// neighbors (odd k, Euclidean) and the constant majority-label predictor.
#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "scd/common.hpp"
#include "scd/features.hpp"
#include "scd/linalg.hpp"

namespace scd {

struct KnnIndex {
    Matrix rows;
    std::vector<Label> labels;
    std::size_t k = 1;
};

inline KnnIndex build_knn_index(const Dataset& ds, std::size_t k) {
    if (k < 1 || k % 2 == 0)
        throw ConfigError("k must be odd and >= 1, got " + std::to_string(k));
    if (k > ds.rows())
        throw ConfigError("k = " + std::to_string(k) + " exceeds stored row count " +
                          std::to_string(ds.rows()));
    return {ds.features, ds.labels, k};
}

namespace detail {

// Indices of the k nearest stored rows. Distance ties resolve to the lower
// stored-row index, so results do not depend on sort internals.
inline std::vector<std::size_t> k_nearest(const KnnIndex& index, std::span<const double> query) {
    if (query.size() != index.rows.cols)
        throw ValidationError("query has " + std::to_string(query.size()) +
                              " features, index stores " + std::to_string(index.rows.cols));
    std::vector<std::pair<double, std::size_t>> dist(index.rows.rows);
    for (std::size_t r = 0; r < index.rows.rows; ++r)
        dist[r] = {squared_distance(index.rows.row(r), query), r};
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(index.k),
                      dist.end());
    std::vector<std::size_t> out(index.k);
    for (std::size_t i = 0; i < index.k; ++i) out[i] = dist[i].second;
    return out;
}

}  // namespace detail

// Fraction of Split labels among the k nearest neighbors; serves as the
// baseline's score for threshold sweeps.
inline double knn_split_fraction(const KnnIndex& index, std::span<const double> query) {
    std::size_t split = 0;
    for (std::size_t r : detail::k_nearest(index, query))
        if (index.labels[r] == Label::Split) ++split;
    return static_cast<double>(split) / static_cast<double>(index.k);
}

// Majority label among the k nearest; odd k rules out label ties.
inline Label knn_classify(const KnnIndex& index, std::span<const double> query) {
    return knn_split_fraction(index, query) > 0.5 ? Label::Split : Label::Same;
}

inline std::vector<double> knn_scores(const KnnIndex& index, const Matrix& queries) {
    std::vector<double> out(queries.rows);
    for (std::size_t r = 0; r < queries.rows; ++r)
        out[r] = knn_split_fraction(index, queries.row(r));
    return out;
}

inline std::vector<Label> knn_predict(const KnnIndex& index, const Matrix& queries) {
    std::vector<Label> out(queries.rows);
    for (std::size_t r = 0; r < queries.rows; ++r) out[r] = knn_classify(index, queries.row(r));
    return out;
}

// Constant classifier returning the more frequent training label; an exact
// tie goes to Same.
inline Label majority_label(std::size_t n_same, std::size_t n_split) {
    return n_split > n_same ? Label::Split : Label::Same;
}

}  // namespace scd
