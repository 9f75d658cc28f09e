#pragma once

// Shared fixtures and independent oracles for the test suites. Everything in
// here is deliberately written the dumb way (triple loops, dense all-pairs
// BFS, explicit formulas) and must stay independent of the library paths it
// is used to check.

#include "tdss/graph.hpp"
#include "tdss/numerics.hpp"
#include "tdss/rng.hpp"
#include "tdss/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

namespace tdss::test {

inline DenseMatrix random_dense(Index rows, Index cols, SplitMix64& rng,
                                Scalar scale = 1.0) {
    DenseMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            m(i, j) = scale * (2.0 * rng.uniform01() - 1.0);
        }
    }
    return m;
}

inline SparseMatrix random_sparse(Index rows, Index cols, Scalar density,
                                  SplitMix64& rng) {
    std::vector<Eigen::Triplet<Scalar, Index>> t;
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            if (rng.uniform01() < density) {
                t.emplace_back(i, j, 2.0 * rng.uniform01() - 1.0);
            }
        }
    }
    SparseMatrix s(rows, cols);
    s.setFromTriplets(t.begin(), t.end());
    s.makeCompressed();
    return s;
}

inline Graph random_er_graph(Index n, Scalar p, SplitMix64& rng) {
    std::vector<std::pair<Index, Index>> edges;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            if (rng.uniform01() < p) edges.emplace_back(i, j);
        }
    }
    return Graph::from_edges(n, edges);
}

inline Graph path_graph(Index n) {
    std::vector<std::pair<Index, Index>> edges;
    for (Index i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return Graph::from_edges(n, edges);
}

// Hub 0 with `leaves` leaves.
inline Graph star_graph(Index leaves) {
    std::vector<std::pair<Index, Index>> edges;
    for (Index i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
    return Graph::from_edges(leaves + 1, edges);
}

inline DenseMatrix naive_matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c = DenseMatrix::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            for (Eigen::Index k = 0; k < a.cols(); ++k) {
                c(i, j) += a(i, k) * b(k, j);
            }
        }
    }
    return c;
}

// Full BFS from every node; dist[v][u] == -1 when unreachable.
inline std::vector<std::vector<Index>> all_pairs_bfs(const Graph& g) {
    std::vector<std::vector<Index>> dist(g.num_nodes,
                                         std::vector<Index>(g.num_nodes, -1));
    for (Index s = 0; s < g.num_nodes; ++s) {
        std::deque<Index> q{s};
        dist[s][s] = 0;
        while (!q.empty()) {
            const Index cur = q.front();
            q.pop_front();
            for (const Index nb : g.neighbors(cur)) {
                if (dist[s][nb] == -1) {
                    dist[s][nb] = dist[s][cur] + 1;
                    q.push_back(nb);
                }
            }
        }
    }
    return dist;
}

// Eq.-style ordered-pair loop for the smoothing penalty.
inline Scalar naive_smoothing_value(const DenseMatrix& h, const SampledAdjacency& sa) {
    const Index n = static_cast<Index>(sa.matrix.rows());
    const DenseMatrix a = densify(sa.matrix);
    Scalar value = 0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (a(i, j) == 0.0) continue;
            const Scalar di = static_cast<Scalar>(sa.degrees_tilde[i]);
            const Scalar dj = static_cast<Scalar>(sa.degrees_tilde[j]);
            value += 0.5 * (h.row(i) / std::sqrt(di) - h.row(j) / std::sqrt(dj))
                               .squaredNorm();
        }
    }
    return value;
}

// trace(H^T Lhat H) with Lhat = I_active - D~^{-1/2} A~ D~^{-1/2}.
inline Scalar trace_smoothing_value(const DenseMatrix& h, const SampledAdjacency& sa) {
    const Index n = static_cast<Index>(sa.matrix.rows());
    DenseMatrix lhat = DenseMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        if (sa.degrees_tilde[i] > 0) lhat(i, i) = 1.0;
    }
    const DenseMatrix a = densify(sa.matrix);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (a(i, j) != 0.0) {
                lhat(i, j) -= 1.0 / std::sqrt(static_cast<Scalar>(sa.degrees_tilde[i]) *
                                              static_cast<Scalar>(sa.degrees_tilde[j]));
            }
        }
    }
    return (h.transpose() * lhat * h).trace();
}

inline Scalar gaussian_kernel_naive(const DenseMatrix& a, Eigen::Index i,
                                    const DenseMatrix& b, Eigen::Index j, Scalar sigma) {
    return std::exp(-(a.row(i) - b.row(j)).squaredNorm() / (2.0 * sigma * sigma));
}

inline Scalar naive_mmd2(const DenseMatrix& hs, const DenseMatrix& ht, Scalar sigma) {
    const Eigen::Index m = hs.rows();
    const Eigen::Index n = ht.rows();
    Scalar ss = 0, tt = 0, st = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            ss += gaussian_kernel_naive(hs, i, hs, j, sigma);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            tt += gaussian_kernel_naive(ht, i, ht, j, sigma);
        }
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            st += gaussian_kernel_naive(hs, i, ht, j, sigma);
        }
    }
    return ss / static_cast<Scalar>(m * m) + tt / static_cast<Scalar>(n * n) -
           2.0 * st / static_cast<Scalar>(m * n);
}

// Exhaustive smoothness: all-pairs BFS plus a full sup scan per node.
inline Scalar brute_smoothness(const DenseMatrix& h, const Graph& g,
                               const DenseMatrix& features, Index k, Scalar r) {
    const auto dist = all_pairs_bfs(g);
    Scalar total = 0;
    for (Index i = 0; i < g.num_nodes; ++i) {
        Scalar sup = 0;
        for (Index j = 0; j < g.num_nodes; ++j) {
            if (j == i || dist[i][j] < 0 || dist[i][j] > k) continue;
            if ((features.row(i) - features.row(j)).cwiseAbs().maxCoeff() > r) continue;
            sup = std::max(sup, (h.row(i) - h.row(j)).cwiseAbs().maxCoeff());
        }
        total += sup;
    }
    return total / static_cast<Scalar>(g.num_nodes);
}

// Central finite differences of a scalar function of one matrix.
template <typename F>
DenseMatrix fd_gradient(DenseMatrix x, F&& f, Scalar h = 1e-5) {
    DenseMatrix g(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const Scalar orig = x(i, j);
            x(i, j) = orig + h;
            const Scalar fp = f(static_cast<const DenseMatrix&>(x));
            x(i, j) = orig - h;
            const Scalar fm = f(static_cast<const DenseMatrix&>(x));
            x(i, j) = orig;
            g(i, j) = (fp - fm) / (2.0 * h);
        }
    }
    return g;
}

// ||a - b||_inf / max(1, ||a||_inf, ||b||_inf): the gradient-check error.
inline Scalar gradient_rel_error(const DenseMatrix& a, const DenseMatrix& b) {
    const Scalar scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

// A~ = A: wraps a graph's own adjacency as a sampled adjacency.
inline SampledAdjacency full_sampled(const Graph& g) {
    SampledAdjacency sa;
    sa.matrix = g.adjacency;
    sa.degrees_tilde = g.degrees;
    sa.rho = g.num_nodes > 0 ? static_cast<Scalar>(g.adjacency.nonZeros()) /
                                   static_cast<Scalar>(g.num_nodes)
                             : 0.0;
    return sa;
}

}  // namespace tdss::test
