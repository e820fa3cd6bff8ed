#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "netpoint/errors.hpp"
#include "netpoint/matrix.hpp"

namespace netpoint {

/// Three-layer communication structure: a pair of sensing agents (ids 1, 2)
/// coupled by cross-gains k12/k21, a layer of n-2 non-sensing agents wired by
/// a weighted adjacency matrix, and per-NSA input weights from each SA.
///
/// Edge convention: nsa_adjacency(i, j) > 0 means NSA row i receives from NSA
/// row j (rows/columns are 0-based over agents 3..n). sa_input(i, 0) and
/// sa_input(i, 1) are the weights with which NSA row i hears SA 1 and SA 2.
struct Topology {
    int n = 0;            // total agent count, >= 3
    double k12 = 1.0;     // SA 1 <- SA 2 gain
    double k21 = 1.0;     // SA 2 <- SA 1 gain
    Matrix nsa_adjacency; // (n-2) x (n-2), nonnegative, zero diagonal
    Matrix sa_input;      // (n-2) x 2, nonnegative

    int nsa_count() const { return n - 2; }

    void validate() const {
        if (n < 3) {
            throw Error(ErrorCode::invariant_violation,
                        "topology: need at least 3 agents, got " + std::to_string(n));
        }
        if (!(k12 > 0.0) || !(k21 > 0.0) || !std::isfinite(k12) || !std::isfinite(k21)) {
            throw Error(ErrorCode::invariant_violation,
                        "topology: gains k12 and k21 must be positive finite");
        }
        const std::size_t m = static_cast<std::size_t>(n - 2);
        if (nsa_adjacency.rows() != m || nsa_adjacency.cols() != m) {
            throw Error(ErrorCode::invariant_violation,
                        "topology: nsa_adjacency must be " + std::to_string(m) + "x" +
                            std::to_string(m));
        }
        if (sa_input.rows() != m || sa_input.cols() != 2) {
            throw Error(ErrorCode::invariant_violation,
                        "topology: sa_input must be " + std::to_string(m) + "x2");
        }
        if (!nsa_adjacency.all_finite() || !sa_input.all_finite()) {
            throw Error(ErrorCode::invariant_violation, "topology: non-finite weight");
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (nsa_adjacency(i, i) != 0.0) {
                throw Error(ErrorCode::invariant_violation,
                            "topology: nsa_adjacency diagonal must be zero (row " +
                                std::to_string(i) + ")");
            }
            for (std::size_t j = 0; j < m; ++j) {
                if (nsa_adjacency(i, j) < 0.0) {
                    throw Error(ErrorCode::invariant_violation,
                                "topology: negative adjacency weight at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
                }
            }
            if (sa_input(i, 0) < 0.0 || sa_input(i, 1) < 0.0) {
                throw Error(ErrorCode::invariant_violation,
                            "topology: negative SA input weight at row " + std::to_string(i));
            }
        }
    }
};

/// Graph Laplacian L = D - A with D the row-sum diagonal. Every row of L sums
/// to zero by construction.
inline Matrix laplacian(const Matrix& adjacency) {
    if (!adjacency.square()) {
        throw Error(ErrorCode::invalid_input, "laplacian: adjacency must be square");
    }
    if (!adjacency.all_finite()) {
        throw Error(ErrorCode::invalid_input, "laplacian: non-finite entry");
    }
    const std::size_t m = adjacency.rows();
    Matrix l(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        if (adjacency(i, i) != 0.0) {
            throw Error(ErrorCode::invalid_input, "laplacian: nonzero diagonal");
        }
        double row_sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double a = adjacency(i, j);
            if (a < 0.0) {
                throw Error(ErrorCode::invalid_input, "laplacian: negative weight");
            }
            if (i != j) {
                l(i, j) = -a;
                row_sum += a;
            }
        }
        l(i, i) = row_sum;
    }
    return l;
}

/// Result of merging the two SAs into a single virtual fusion node: the NSA
/// Laplacian plus the fused input weights b_f[i] = beta_i1 + beta_i2 and the
/// residual weights b_e[i] = beta_i2.
struct ReducedGraph {
    Matrix laplacian;
    std::vector<double> b_f;
    std::vector<double> b_e;
    Matrix b_f_diag;

    std::size_t nsa_count() const { return b_f.size(); }
};

inline ReducedGraph fusion_reduce(const Topology& topology) {
    topology.validate();
    const std::size_t m = static_cast<std::size_t>(topology.nsa_count());
    ReducedGraph g;
    g.laplacian = laplacian(topology.nsa_adjacency);
    g.b_f.resize(m);
    g.b_e.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        g.b_f[i] = topology.sa_input(i, 0) + topology.sa_input(i, 1);
        g.b_e[i] = topology.sa_input(i, 1);
    }
    g.b_f_diag = Matrix::diagonal(g.b_f);
    return g;
}

/// True iff every NSA node is reachable from the virtual fusion node in the
/// directed reduced graph. Edges follow information flow: fusion -> i when
/// b_f[i] > 0, and j -> i when NSA i receives from NSA j (adjacency recovered
/// from the Laplacian off-diagonals).
inline bool fusion_spanning_tree_check(const ReducedGraph& reduced) {
    const std::size_t m = reduced.nsa_count();
    std::vector<char> visited(m, 0);
    std::vector<std::size_t> queue;
    for (std::size_t i = 0; i < m; ++i) {
        if (reduced.b_f[i] > 0.0) {
            visited[i] = 1;
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        const std::size_t j = queue.back();
        queue.pop_back();
        for (std::size_t i = 0; i < m; ++i) {
            // L(i, j) < 0 means alpha_ij > 0, so information flows j -> i.
            if (!visited[i] && reduced.laplacian(i, j) < 0.0) {
                visited[i] = 1;
                queue.push_back(i);
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (!visited[i]) return false;
    }
    return true;
}

struct Assumption2Report {
    bool exists_positive_bf = false;
    bool spanning_tree = false;
    bool satisfied = false;
};

/// Checks the fusion-node connectivity assumption: at least one NSA hears an
/// SA, and the fusion node reaches every NSA along directed edges.
inline Assumption2Report assumption2_certificate(const ReducedGraph& reduced) {
    Assumption2Report report;
    for (double b : reduced.b_f) {
        if (b > 0.0) {
            report.exists_positive_bf = true;
            break;
        }
    }
    report.spanning_tree = fusion_spanning_tree_check(reduced);
    report.satisfied = report.exists_positive_bf && report.spanning_tree;
    return report;
}

} // namespace netpoint
