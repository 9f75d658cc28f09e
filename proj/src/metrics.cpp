#include "tdss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace tdss {

namespace {

void check_lengths(std::span<const Index> a, std::span<const Index> b, const char* op) {
    if (a.size() != b.size()) {
        throw ShapeError(std::string(op) + ": length mismatch (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
}

std::vector<std::vector<long>> confusion(std::span<const Index> pred,
                                         std::span<const Index> truth,
                                         Index num_classes, const char* op) {
    std::vector<std::vector<long>> c(num_classes, std::vector<long>(num_classes, 0));
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] < 0 || pred[i] >= num_classes || truth[i] < 0 || truth[i] >= num_classes) {
            throw DataError(std::string(op) + ": class id out of range at position " +
                            std::to_string(i));
        }
        ++c[truth[i]][pred[i]];
    }
    return c;
}

}  // namespace

Scalar micro_f1(std::span<const Index> pred, std::span<const Index> truth,
                Index num_classes) {
    check_lengths(pred, truth, "micro_f1");
    if (pred.empty()) throw DataError("micro_f1: empty input");
    const auto c = confusion(pred, truth, num_classes, "micro_f1");
    long correct = 0;
    for (Index k = 0; k < num_classes; ++k) correct += c[k][k];
    // Micro precision == micro recall == accuracy for single-label multiclass.
    return static_cast<Scalar>(correct) / static_cast<Scalar>(pred.size());
}

Scalar macro_f1(std::span<const Index> pred, std::span<const Index> truth,
                Index num_classes) {
    check_lengths(pred, truth, "macro_f1");
    if (pred.empty()) throw DataError("macro_f1: empty input");
    if (num_classes < 1) throw DataError("macro_f1: num_classes must be >= 1");
    const auto c = confusion(pred, truth, num_classes, "macro_f1");
    Scalar sum = 0;
    for (Index k = 0; k < num_classes; ++k) {
        long tp = c[k][k];
        long fp = 0;
        long fn = 0;
        for (Index j = 0; j < num_classes; ++j) {
            if (j != k) {
                fp += c[j][k];
                fn += c[k][j];
            }
        }
        const Scalar precision = tp + fp > 0 ? static_cast<Scalar>(tp) / (tp + fp) : 0.0;
        const Scalar recall = tp + fn > 0 ? static_cast<Scalar>(tp) / (tp + fn) : 0.0;
        // Classes absent from both pred and truth contribute 0 to the mean.
        sum += precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    }
    return sum / static_cast<Scalar>(num_classes);
}

Scalar nmi(std::span<const Index> a, std::span<const Index> b) {
    check_lengths(a, b, "nmi");
    if (a.empty()) throw DataError("nmi: empty input");

    std::map<Index, Index> ida, idb;
    for (const Index v : a) ida.emplace(v, static_cast<Index>(ida.size()));
    for (const Index v : b) idb.emplace(v, static_cast<Index>(idb.size()));
    const std::size_t ka = ida.size();
    const std::size_t kb = idb.size();
    const Scalar n = static_cast<Scalar>(a.size());

    std::vector<std::vector<long>> joint(ka, std::vector<long>(kb, 0));
    std::vector<long> ca(ka, 0), cb(kb, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Index ia = ida[a[i]];
        const Index ib = idb[b[i]];
        ++joint[ia][ib];
        ++ca[ia];
        ++cb[ib];
    }

    Scalar ha = 0, hb = 0;
    for (const long c : ca) {
        const Scalar p = c / n;
        if (p > 0) ha -= p * std::log(p);
    }
    for (const long c : cb) {
        const Scalar p = c / n;
        if (p > 0) hb -= p * std::log(p);
    }
    if (ha == 0.0 && hb == 0.0) return 1.0;  // both single-cluster: identical partitions
    if (ha == 0.0 || hb == 0.0) return 0.0;

    Scalar mi = 0;
    for (std::size_t i = 0; i < ka; ++i) {
        for (std::size_t j = 0; j < kb; ++j) {
            if (joint[i][j] == 0) continue;
            const Scalar pij = joint[i][j] / n;
            mi += pij * std::log(pij * n * n / (static_cast<Scalar>(ca[i]) * cb[j]));
        }
    }
    return mi / std::sqrt(ha * hb);
}

std::vector<Index> argmax_rows(const DenseMatrix& logits) {
    std::vector<Index> out(logits.rows());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Index best = 0;
        for (Eigen::Index j = 1; j < logits.cols(); ++j) {
            if (logits(i, j) > logits(i, best)) best = static_cast<Index>(j);
        }
        out[i] = best;
    }
    return out;
}

}  // namespace tdss
