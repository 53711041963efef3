#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP implementation and a
// plain serial reference in `reference::` that the tests and the benchmark
// compare against.

#include "wordprobe/common.hpp"

#include <vector>

namespace wordprobe::kernels {

// Rows of `rows` scaled to unit length. Zero rows throw.
Matrix normalize_rows(const Matrix& rows);

/// Pearson r between `target` and the cosine similarity of every entity row
/// with each word row: result[j] = r( cos(entities_i, words_j) over i, target ).
/// entities: n x d, words: m x d, target: n.
/// A word whose similarity profile has zero variance gets NaN.
std::vector<double> similarity_correlations(const Matrix& entities,
                                            const Matrix& words,
                                            const Vector& target);

// X - X B B'.
Matrix project_out(const Matrix& rows, const Matrix& basis);

namespace reference {

std::vector<double> similarity_correlations(const Matrix& entities,
                                            const Matrix& words,
                                            const Vector& target);

Matrix project_out(const Matrix& rows, const Matrix& basis);

}  // namespace reference

}  // namespace wordprobe::kernels
