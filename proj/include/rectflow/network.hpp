#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "rectflow/embedding.hpp"

namespace rectflow {

/// Conductance assignment: one default plus per-edge overrides (unordered
/// vertex pairs). A pair given twice is an error, not last-wins.
struct ConductanceSpec {
    double default_value = 1.0;
    std::vector<std::tuple<int, int, double>> overrides;
};

struct BoundaryLabels {
    std::vector<int> e1;
    std::vector<std::vector<int>> e2;
};

/// A finite network: 1-skeleton of an embedded surface with positive edge
/// conductances and Dirichlet labels E1 (potential k) and E2^i (potential 0).
/// In the standard construction the label sets are exactly the vertex sets
/// of boundary components; `with_labels` admits explicit sets for network
/// fixtures that are not surface boundaries.
class ConductanceNetwork {
public:
    enum class Label { Interior, E1, E2 };

    static ConductanceNetwork from_embedding(Embedding emb, const ConductanceSpec& spec,
                                             int e1_component) {
        if (emb.hole_count() == 0)
            throw std::invalid_argument("network: surface has no boundary components to label");
        if (e1_component < 0 || e1_component >= emb.hole_count())
            throw std::invalid_argument("network: E1 boundary component index out of range");
        BoundaryLabels labels;
        labels.e1 = emb.holes()[e1_component];
        for (int h = 0; h < emb.hole_count(); ++h)
            if (h != e1_component) labels.e2.push_back(emb.holes()[h]);
        return ConductanceNetwork(std::move(emb), spec, std::move(labels));
    }

    static ConductanceNetwork with_labels(Embedding emb, const ConductanceSpec& spec,
                                          BoundaryLabels labels) {
        return ConductanceNetwork(std::move(emb), spec, std::move(labels));
    }

    const Embedding& embedding() const { return emb_; }
    double conductance(int edge) const { return c_[edge]; }
    const std::vector<double>& conductances() const { return c_; }
    double conductance_sum() const { return c_sum_; }

    Label label(int v) const { return label_[v]; }
    bool is_interior(int v) const { return label_[v] == Label::Interior; }
    /// Which E2 component v belongs to, or -1.
    int e2_component(int v) const { return e2_comp_[v]; }

    const std::vector<int>& e1_vertices() const { return labels_.e1; }
    const std::vector<std::vector<int>>& e2_components() const { return labels_.e2; }

    /// Interior vertices in ascending id order (the solver unknowns).
    const std::vector<int>& interior_vertices() const { return interior_; }

    double weighted_degree(int v) const {
        double d = 0;
        for (const auto& [u, e] : emb_.rotation(v)) d += c_[e];
        return d;
    }

    /// Scales every conductance by a positive factor (returns a new network;
    /// the harmonic potential is invariant under this).
    ConductanceNetwork scaled(double factor) const {
        if (factor <= 0) throw std::invalid_argument("network: scale factor must be positive");
        ConductanceNetwork out = *this;
        out.c_sum_ = 0;
        for (double& c : out.c_) out.c_sum_ += (c *= factor);
        return out;
    }

private:
    ConductanceNetwork(Embedding emb, const ConductanceSpec& spec, BoundaryLabels labels)
        : emb_(std::move(emb)), labels_(std::move(labels)) {
        if (spec.default_value <= 0)
            throw std::invalid_argument("network: nonpositive conductance");
        c_.assign(emb_.edge_count(), spec.default_value);
        std::vector<char> overridden(emb_.edge_count(), 0);
        for (const auto& [u, v, value] : spec.overrides) {
            int e = emb_.edge_index(u, v);
            if (e < 0)
                throw std::invalid_argument("network: conductance override names missing edge " +
                                            std::to_string(u) + "-" + std::to_string(v));
            if (overridden[e])
                throw std::invalid_argument("network: duplicate conductance override for edge " +
                                            std::to_string(u) + "-" + std::to_string(v));
            if (value <= 0) throw std::invalid_argument("network: nonpositive conductance");
            overridden[e] = 1;
            c_[e] = value;
        }
        c_sum_ = 0;
        for (double c : c_) c_sum_ += c;

        label_.assign(emb_.vertex_count(), Label::Interior);
        e2_comp_.assign(emb_.vertex_count(), -1);
        auto mark = [&](int v, Label l, int comp) {
            if (v < 0 || v >= emb_.vertex_count())
                throw std::invalid_argument("network: label names vertex out of range");
            if (label_[v] != Label::Interior)
                throw std::invalid_argument("network: vertex " + std::to_string(v) +
                                            " labeled twice");
            label_[v] = l;
            e2_comp_[v] = comp;
        };
        for (int v : labels_.e1) mark(v, Label::E1, -1);
        for (size_t i = 0; i < labels_.e2.size(); ++i)
            for (int v : labels_.e2[i]) mark(v, Label::E2, static_cast<int>(i));

        for (int v = 0; v < emb_.vertex_count(); ++v)
            if (label_[v] == Label::Interior) interior_.push_back(v);

        // Every interior vertex must reach a labeled vertex.
        std::vector<char> reached(emb_.vertex_count(), 0);
        std::vector<int> stack;
        for (int v = 0; v < emb_.vertex_count(); ++v)
            if (label_[v] != Label::Interior) {
                reached[v] = 1;
                stack.push_back(v);
            }
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (const auto& [u, e] : emb_.rotation(v))
                if (!reached[u]) {
                    reached[u] = 1;
                    stack.push_back(u);
                }
        }
        for (int v = 0; v < emb_.vertex_count(); ++v)
            if (!reached[v])
                throw std::invalid_argument(
                    "network: interior component with no boundary contact (floating component)");
    }

    Embedding emb_;
    std::vector<double> c_;
    double c_sum_ = 0;
    BoundaryLabels labels_;
    std::vector<Label> label_;
    std::vector<int> e2_comp_;
    std::vector<int> interior_;
};

/// Combinatorial Laplacian at v with the positive semidefinite sign:
/// sum over neighbors of c(v,u) * (g(v) - g(u)).
inline double laplacian_at(const ConductanceNetwork& net, const std::vector<double>& g, int v) {
    double s = 0;
    for (const auto& [u, e] : net.embedding().rotation(v))
        s += net.conductance(e) * (g[v] - g[u]);
    return s;
}

// ---------------------------------------------------------------------------
// Dirichlet solve
// ---------------------------------------------------------------------------

enum class SolveMethod { Auto, ConjugateGradient, DenseCholesky };

struct SolverOptions {
    SolveMethod method = SolveMethod::Auto;
    double rel_tol = 1e-12;
    int max_iterations = 0;  // 0: derived from the unknown count
};

/// Solution of the discrete Dirichlet problem: g = k on E1, g = 0 on E2,
/// Laplacian zero at interior vertices (up to the recorded residual).
class HarmonicSolution {
public:
    HarmonicSolution(ConductanceNetwork net, double k, std::vector<double> g,
                     std::string method = "direct", int iterations = 0)
        : net_(std::move(net)), k_(k), g_(std::move(g)), method_(std::move(method)),
          iterations_(iterations) {
        if (g_.size() != static_cast<size_t>(net_.embedding().vertex_count()))
            throw std::invalid_argument("solution: potential vector has wrong size");
        residual_ = 0;
        for (int v : net_.interior_vertices())
            residual_ = std::max(residual_, std::abs(laplacian_at(net_, g_, v)));
    }

    const ConductanceNetwork& network() const { return net_; }
    double k() const { return k_; }
    double g(int v) const { return g_[v]; }
    const std::vector<double>& potentials() const { return g_; }
    /// max |Laplacian| over interior vertices.
    double residual() const { return residual_; }
    const std::string& method() const { return method_; }
    int iterations() const { return iterations_; }

private:
    ConductanceNetwork net_;
    double k_;
    std::vector<double> g_;
    std::string method_;
    int iterations_;
    double residual_;
};

namespace detail {

/// Jacobi-preconditioned conjugate gradients on the interior block of the
/// weighted Laplacian. Fixed iteration and summation order, so results are
/// reproducible and symmetric inputs keep exactly symmetric iterates.
inline bool conjugate_gradient(const std::vector<std::vector<std::pair<int, double>>>& rows,
                               const std::vector<double>& diag, std::vector<double>& x,
                               const std::vector<double>& b, double rel_tol, int max_iter,
                               int& iterations) {
    size_t n = b.size();
    auto dot = [n](const std::vector<double>& a, const std::vector<double>& c) {
        double s = 0;
        for (size_t i = 0; i < n; ++i) s += a[i] * c[i];
        return s;
    };
    auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (size_t i = 0; i < n; ++i) {
            double s = diag[i] * v[i];
            for (const auto& [j, c] : rows[i]) s -= c * v[j];
            out[i] = s;
        }
    };
    x.assign(n, 0.0);
    std::vector<double> r(b), z(n), p(n), q(n);
    double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0) {
        iterations = 0;
        return true;
    }
    for (size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = dot(r, z);
    for (int it = 1; it <= max_iter; ++it) {
        apply(p, q);
        double pq = dot(p, q);
        if (pq <= 0) return false;  // lost positive definiteness numerically
        double alpha = rz / pq;
        for (size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (size_t i = 0; i < n; ++i) r[i] -= alpha * q[i];
        double rnorm = std::sqrt(dot(r, r));
        iterations = it;
        if (rnorm <= rel_tol * bnorm) return true;
        for (size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return false;
}

/// Dense LDL^T factorization (no pivoting; the reduced Laplacian is SPD).
inline bool dense_ldlt(std::vector<std::vector<double>>& a, std::vector<double>& x,
                       const std::vector<double>& b) {
    size_t n = b.size();
    x = b;
    std::vector<double> d(n);
    for (size_t j = 0; j < n; ++j) {
        double dj = a[j][j];
        for (size_t k = 0; k < j; ++k) dj -= a[j][k] * a[j][k] * d[k];
        if (dj <= 0) return false;
        d[j] = dj;
        for (size_t i = j + 1; i < n; ++i) {
            double v = a[i][j];
            for (size_t k = 0; k < j; ++k) v -= a[i][k] * a[j][k] * d[k];
            a[i][j] = v / dj;
        }
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < i; ++k) x[i] -= a[i][k] * x[k];
    for (size_t i = 0; i < n; ++i) x[i] /= d[i];
    for (size_t i = n; i-- > 0;)
        for (size_t k = i + 1; k < n; ++k) x[i] -= a[k][i] * x[k];
    return true;
}

}  // namespace detail

/// Solves the discrete Dirichlet boundary value problem. The default method
/// is conjugate gradients: besides scaling, it terminates exactly on the
/// symmetric fixtures (grid cylinders), which keeps structurally equal
/// potentials bitwise equal and zero-flux edges exactly degenerate. A dense
/// LDL^T path is available explicitly and as a stagnation fallback.
inline HarmonicSolution solve_dirichlet(const ConductanceNetwork& net, double k = 1.0,
                                        const SolverOptions& opt = {}) {
    if (k <= 0) throw std::invalid_argument("solve: k must be positive");
    if (net.e1_vertices().empty()) throw std::invalid_argument("solve: empty E1");
    if (net.e2_components().empty() ||
        std::all_of(net.e2_components().begin(), net.e2_components().end(),
                    [](const auto& c) { return c.empty(); }))
        throw std::invalid_argument("solve: empty E2");

    const auto& emb = net.embedding();
    const auto& interior = net.interior_vertices();
    size_t n = interior.size();
    std::vector<int> index(emb.vertex_count(), -1);
    for (size_t i = 0; i < n; ++i) index[interior[i]] = static_cast<int>(i);

    std::vector<double> g(emb.vertex_count(), 0.0);
    for (int v : net.e1_vertices()) g[v] = k;

    if (n > 0) {
        std::vector<std::vector<std::pair<int, double>>> rows(n);
        std::vector<double> diag(n, 0.0), b(n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            int v = interior[i];
            // ascending neighbor id order, independent of the rotation system
            std::vector<std::pair<int, int>> nbrs(emb.rotation(v).begin(),
                                                  emb.rotation(v).end());
            std::sort(nbrs.begin(), nbrs.end());
            for (const auto& [u, e] : nbrs) {
                double c = net.conductance(e);
                diag[i] += c;
                if (index[u] >= 0)
                    rows[i].push_back({index[u], c});
                else
                    b[i] += c * g[u];
            }
        }
        std::vector<double> x;
        int iterations = 0;
        std::string method;
        auto run_dense = [&]() {
            std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
            for (size_t i = 0; i < n; ++i) {
                a[i][i] = diag[i];
                for (const auto& [j, c] : rows[i]) a[i][j] -= c;
            }
            if (!detail::dense_ldlt(a, x, b))
                throw std::runtime_error("solve: dense factorization failed (not SPD)");
            method = "dense-ldlt";
        };
        if (opt.method == SolveMethod::DenseCholesky) {
            run_dense();
        } else {
            int max_iter = opt.max_iterations > 0 ? opt.max_iterations
                                                  : 40 * static_cast<int>(n) + 1000;
            bool ok = detail::conjugate_gradient(rows, diag, x, b, opt.rel_tol, max_iter,
                                                 iterations);
            method = "cg";
            if (!ok) {
                if (opt.method == SolveMethod::ConjugateGradient || n > 2000)
                    throw std::runtime_error("solve: conjugate gradient did not converge");
                run_dense();
            }
        }
        for (size_t i = 0; i < n; ++i) g[interior[i]] = x[i];
        return HarmonicSolution(net, k, std::move(g), method, iterations);
    }
    return HarmonicSolution(net, k, std::move(g), "boundary-only", 0);
}

/// Laplacian of the solved potential at an interior vertex.
inline double laplacian(const HarmonicSolution& sol, int v) {
    if (!sol.network().is_interior(v))
        throw std::invalid_argument("laplacian: vertex " + std::to_string(v) +
                                    " is a boundary vertex");
    return laplacian_at(sol.network(), sol.potentials(), v);
}

/// Dirichlet energy, normalized without the 1/2 factor so that the energy
/// equals the tiled area: E(g) = sum over edges of c * (dg)^2.
inline double dirichlet_energy(const HarmonicSolution& sol) {
    const auto& emb = sol.network().embedding();
    double e = 0;
    for (int i = 0; i < emb.edge_count(); ++i) {
        const auto& [u, v] = std::pair(emb.edges()[i].a, emb.edges()[i].b);
        double d = sol.g(u) - sol.g(v);
        e += sol.network().conductance(i) * d * d;
    }
    return e;
}

/// Normal derivative at a labeled vertex: net weighted flux out of x. With
/// this sign it is >= 0 on E1 and <= 0 on E2.
inline double normal_derivative(const HarmonicSolution& sol, int x) {
    if (sol.network().is_interior(x))
        throw std::invalid_argument("normal_derivative: vertex " + std::to_string(x) +
                                    " is interior");
    return laplacian_at(sol.network(), sol.potentials(), x);
}

struct BoundaryFlux {
    double length_e1 = 0;                 // sum of normal derivatives over E1
    std::vector<double> length_e2;        // minus the sums over each E2^i
    double green_sum = 0;                 // over all labeled vertices; ~0
};

/// The signed boundary sums that the tiling theorem turns into cuff lengths.
inline BoundaryFlux boundary_flux(const HarmonicSolution& sol) {
    BoundaryFlux f;
    for (int x : sol.network().e1_vertices()) {
        double nd = normal_derivative(sol, x);
        f.length_e1 += nd;
        f.green_sum += nd;
    }
    for (const auto& comp : sol.network().e2_components()) {
        double s = 0;
        for (int x : comp) {
            double nd = normal_derivative(sol, x);
            s += nd;
            f.green_sum += nd;
        }
        f.length_e2.push_back(-s);
    }
    return f;
}

}  // namespace rectflow
