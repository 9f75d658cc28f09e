#pragma once

#include "tdss/types.hpp"

#include <span>
#include <vector>

namespace tdss {

// Globally pooled F1; equals accuracy for single-label multiclass.
Scalar micro_f1(std::span<const Index> pred, std::span<const Index> truth,
                Index num_classes);

// Unweighted mean of per-class F1. A class absent from both pred and truth
// still contributes an F1 of 0 to the mean.
Scalar macro_f1(std::span<const Index> pred, std::span<const Index> truth,
                Index num_classes);

// Normalized mutual information I(A;B) / sqrt(H(A) H(B)) with natural logs.
// If both partitions are single-cluster the result is 1; if exactly one is
// degenerate the result is 0.
Scalar nmi(std::span<const Index> a, std::span<const Index> b);

// Row-wise argmax; ties break to the lowest class index.
std::vector<Index> argmax_rows(const DenseMatrix& logits);

}  // namespace tdss
