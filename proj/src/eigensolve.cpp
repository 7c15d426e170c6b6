#include "specgap/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "specgap/errors.hpp"

namespace specgap {

namespace {

// Deterministic start vector independent of the standard library's RNG
// distributions.
struct XorShift {
    std::uint64_t s;
    explicit XorShift(std::uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    double next() {
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        const std::uint64_t r = s * 0x2545f4914f6cdd1dULL;
        return static_cast<double>(r >> 11) / 9007199254740992.0 - 0.5;
    }
};

bool is_real_tridiagonal(const SpMat& M) {
    for (int c = 0; c < M.outerSize(); ++c)
        for (SpMat::InnerIterator it(M, c); it; ++it) {
            if (std::abs(it.row() - it.col()) > 1) return false;
            if (it.value().imag() != 0.0) return false;
        }
    return true;
}

std::vector<double> matrix_residuals(const SpMat& M, const std::vector<double>& vals,
                                     const Eigen::MatrixXcd& vecs) {
    std::vector<double> res(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) {
        const Eigen::VectorXcd v = vecs.col(static_cast<int>(i));
        res[i] = (M * v - vals[i] * v).norm() / v.norm();
    }
    return res;
}

Spectrum dense_solve(const DiscreteOperator& op, int m, const SolveOptions& opts) {
    Spectrum s;
    s.h = op.h;
    const int n = op.n();
    if (is_real_tridiagonal(op.M)) {
        Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
        diag.setZero();
        sub.setZero();
        for (int c = 0; c < op.M.outerSize(); ++c)
            for (SpMat::InnerIterator it(op.M, c); it; ++it) {
                if (it.row() == it.col()) diag[it.row()] = it.value().real();
                if (it.row() == it.col() + 1) sub[it.col()] = it.value().real();
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub,
                                  opts.want_vectors ? Eigen::ComputeEigenvectors
                                                    : Eigen::EigenvaluesOnly);
        for (int i = 0; i < m; ++i) s.eigenvalues.push_back(es.eigenvalues()[i]);
        if (opts.want_vectors)
            s.eigenvectors = es.eigenvectors().leftCols(m).cast<cd>();
    } else {
        Eigen::MatrixXcd dense(op.M);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
            dense, opts.want_vectors ? Eigen::ComputeEigenvectors
                                     : Eigen::EigenvaluesOnly);
        for (int i = 0; i < m; ++i) s.eigenvalues.push_back(es.eigenvalues()[i]);
        if (opts.want_vectors) s.eigenvectors = es.eigenvectors().leftCols(m);
    }
    if (opts.want_vectors)
        s.residuals = matrix_residuals(op.M, s.eigenvalues, s.eigenvectors);
    else
        s.residuals.assign(m, 0.0);
    return s;
}

// Shift-invert Lanczos with full reorthogonalization on (M - sigma I)^{-1}.
Spectrum lanczos_solve(const DiscreteOperator& op, int m, const SolveOptions& opts) {
    const int n = op.n();
    double sigma = opts.shift;
    SpMat A = op.M;
    if (sigma != 0.0) {
        SpMat I(n, n);
        I.setIdentity();
        A = op.M - sigma * I;
    }
    // LDLT first (operators are PSD and the default shift sits below the
    // spectrum); LU as the fallback for awkward shifts
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt;
    Eigen::SparseLU<SpMat> lu;
    bool use_ldlt = true;
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success) {
        use_ldlt = false;
        lu.compute(A);
        if (lu.info() != Eigen::Success) {
            // singular at the shift: nudge below the spectrum
            sigma = -1e-8 * std::max(op.scale, 1.0);
            SpMat I(n, n);
            I.setIdentity();
            A = op.M - sigma * I;
            lu.compute(A);
            if (lu.info() != Eigen::Success)
                throw NoConvergence(0, "sparse factorization failed");
        }
    }
    auto apply_inverse = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
        return use_ldlt ? ldlt.solve(x).eval() : lu.solve(x).eval();
    };

    const int cap = std::min(n, std::max(200, opts.max_steps_per_pair * m));
    // the basis usually converges near m + O(100) columns; grow in chunks
    Eigen::MatrixXcd V(n, std::min(cap, m + 128));
    std::vector<double> alpha, beta;

    XorShift rng(opts.seed);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = cd(rng.next(), rng.next());
    v.normalize();
    V.col(0) = v;

    Spectrum out;
    out.h = op.h;
    const double tol_abs = opts.tol * std::max(op.scale, 1e-300);

    Eigen::VectorXcd w(n);
    int k = 0;
    while (k < cap) {
        w = apply_inverse(V.col(k));
        const double a = std::real(V.col(k).dot(w));
        alpha.push_back(a);
        // full reorthogonalization; second pass only on heavy cancellation
        const double pre = w.norm();
        {
            Eigen::VectorXcd coef = V.leftCols(k + 1).adjoint() * w;
            w.noalias() -= V.leftCols(k + 1) * coef;
        }
        if (w.norm() < 0.5 * pre) {
            Eigen::VectorXcd coef = V.leftCols(k + 1).adjoint() * w;
            w.noalias() -= V.leftCols(k + 1) * coef;
        }
        const double b = w.norm();
        ++k;

        const bool last = k == cap || b < 1e-14;
        if (k >= m && (k % 10 == 0 || last)) {
            // Ritz pairs of the tridiagonal T
            Eigen::VectorXd d(k), e(std::max(k - 1, 0));
            for (int i = 0; i < k; ++i) d[i] = alpha[i];
            for (int i = 0; i + 1 < k; ++i) e[i] = beta[i];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
            // largest theta of S <-> smallest lambda of M
            std::vector<int> order(k);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int i, int j) {
                return es.eigenvalues()[i] > es.eigenvalues()[j];
            });
            const int take = std::min(m, k);
            if (!last) {
                // cheap gate before paying for Ritz vectors: |beta_k s_last|
                // estimates the S-residual; the M-residual picks up a factor
                // of ||M - sigma|| through the next basis vector
                bool promising = take == m;
                for (int i = 0; i < take && promising; ++i) {
                    const double theta = es.eigenvalues()[order[i]];
                    const double dlt = std::abs(b * es.eigenvectors()(k - 1, order[i]));
                    promising = theta > 0 && dlt / theta <= opts.tol;
                }
                if (!promising) {
                    beta.push_back(b);
                    if (k >= V.cols())
                        V.conservativeResize(Eigen::NoChange, std::min(cap, k + 128));
                    V.col(k) = w / b;
                    continue;
                }
            }
            Eigen::MatrixXcd X(n, take);
            std::vector<double> vals(take);
            for (int i = 0; i < take; ++i) {
                const Eigen::VectorXd s = es.eigenvectors().col(order[i]);
                X.col(i) = V.leftCols(k) * s.cast<cd>();
                X.col(i).normalize();
                const Eigen::VectorXcd y = op.M * X.col(i);
                vals[i] = std::real(X.col(i).dot(y));
            }
            std::vector<double> res = matrix_residuals(op.M, vals, X);
            bool all_ok = take == m;
            for (int i = 0; i < take && all_ok; ++i) all_ok = res[i] <= tol_abs;
            if (all_ok || last) {
                if (!all_ok) {
                    int bad = 0;
                    for (int i = 0; i < take; ++i)
                        if (res[i] > tol_abs) {
                            bad = i;
                            break;
                        }
                    throw NoConvergence(bad, "eigenpair " + std::to_string(bad) +
                                                 " residual " + std::to_string(res[bad]) +
                                                 " above tolerance after " +
                                                 std::to_string(k) + " Lanczos steps");
                }
                // sort ascending by eigenvalue
                std::vector<int> ord(take);
                std::iota(ord.begin(), ord.end(), 0);
                std::sort(ord.begin(), ord.end(),
                          [&](int i, int j) { return vals[i] < vals[j]; });
                out.eigenvalues.resize(take);
                out.residuals.resize(take);
                if (opts.want_vectors) out.eigenvectors.resize(n, take);
                for (int i = 0; i < take; ++i) {
                    out.eigenvalues[i] = vals[ord[i]];
                    out.residuals[i] = res[ord[i]];
                    if (opts.want_vectors) out.eigenvectors.col(i) = X.col(ord[i]);
                }
                return out;
            }
        }
        if (b < 1e-14) {
            // invariant subspace exhausted before convergence
            throw NoConvergence(0, "Krylov space exhausted at step " + std::to_string(k));
        }
        if (k < cap) {
            beta.push_back(b);
            if (k >= V.cols())
                V.conservativeResize(Eigen::NoChange, std::min(cap, k + 128));
            V.col(k) = w / b;
        }
    }
    throw NoConvergence(0, "Lanczos iteration cap reached");
}

} // namespace

Spectrum lowest_eigenpairs(const DiscreteOperator& op, int m, const SolveOptions& opts) {
    const int n = op.n();
    if (m < 1) throw ConfigError("lowest_eigenpairs: m must be >= 1");
    if (4 * m > n && n > 16)
        throw ConfigError("lowest_eigenpairs: m = " + std::to_string(m) +
                          " exceeds n/4 for n = " + std::to_string(n));
    if (n <= opts.dense_cutoff && !opts.force_iterative) return dense_solve(op, m, opts);
    return lanczos_solve(op, m, opts);
}

int count_below(const DiscreteOperator& op, double t) {
    const int n = op.n();
    SpMat I(n, n);
    I.setIdentity();
    for (int attempt = 0; attempt < 4; ++attempt) {
        const double tt = t * (1.0 + attempt * 3e-13) + attempt * 1e-14 * op.scale;
        SpMat A = op.M - tt * I;
        Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt;
        ldlt.compute(A);
        if (ldlt.info() != Eigen::Success) continue;
        const auto D = ldlt.vectorD();
        int neg = 0;
        bool clean = true;
        for (int i = 0; i < D.size(); ++i) {
            const double d = std::real(D[i]);
            if (std::abs(d) < 1e-300) {
                clean = false;
                break;
            }
            if (d < 0) ++neg;
        }
        if (clean) return neg;
    }
    throw WindowNotExhausted("inertia count failed at threshold " + std::to_string(t));
}

Spectrum spectrum_below(const DiscreteOperator& op, double threshold,
                        const SolveOptions& opts) {
    const int target = count_below(op, threshold);
    Spectrum s;
    s.h = op.h;
    if (target == 0) return s;
    SolveOptions o = opts;
    const int m = target + 1 <= op.n() / 4 ? target + 1 : target;
    Spectrum full = lowest_eigenpairs(op, m, o);
    if (m == target + 1 && full.eigenvalues.back() <= threshold)
        throw WindowNotExhausted("eigenvalue count does not certify the window");
    for (int i = 0; i < target; ++i) {
        s.eigenvalues.push_back(full.eigenvalues[i]);
        s.residuals.push_back(full.residuals[i]);
    }
    if (opts.want_vectors && full.eigenvectors.cols() >= target)
        s.eigenvectors = full.eigenvectors.leftCols(target);
    return s;
}

Spectrum richardson_refine(const std::function<DiscreteOperator(int)>& builder,
                           int m, const SolveOptions& opts) {
    const DiscreteOperator coarse = builder(0);
    const DiscreteOperator fine = builder(1);
    const Spectrum sc = lowest_eigenpairs(coarse, m, opts);
    Spectrum sf = lowest_eigenpairs(fine, m, opts);
    for (int i = 0; i < m; ++i) {
        const double lc = sc.eigenvalues[i], lf = sf.eigenvalues[i];
        sf.discretization_error.push_back(std::abs(lf - lc) / 3.0);
        sf.eigenvalues[i] = (4 * lf - lc) / 3.0;
    }
    sf.h = fine.h;
    return sf;
}

BandFunctionTable track_bands(const std::vector<Spectrum>& spectra,
                              const std::vector<double>& b_samples,
                              double threshold) {
    BandFunctionTable t;
    t.b_samples = b_samples;
    if (spectra.empty()) return t;
    const int J = spectra.front().size();
    const int B = static_cast<int>(spectra.size());
    t.mu.assign(J, std::vector<double>(B, 0.0));

    // perm[j] = index (in the sorted spectrum at the current sample) of branch j
    std::vector<int> perm(J);
    std::iota(perm.begin(), perm.end(), 0);
    for (int j = 0; j < J; ++j) t.mu[j][0] = spectra[0].eigenvalues[j];

    for (int s = 1; s < B; ++s) {
        const auto& prev = spectra[s - 1];
        const auto& cur = spectra[s];
        std::vector<int> next(J, -1);
        bool ambiguous = prev.eigenvectors.size() == 0 || cur.eigenvectors.size() == 0;
        if (!ambiguous) {
            Eigen::MatrixXd overlap =
                (prev.eigenvectors.adjoint() * cur.eigenvectors).cwiseAbs();
            std::vector<bool> used(J, false);
            // greedy assignment by descending overlap
            for (int pick = 0; pick < J; ++pick) {
                int bi = -1, bj = -1;
                double best = -1;
                for (int j = 0; j < J; ++j) {
                    if (next[j] >= 0) continue;
                    for (int i = 0; i < J; ++i) {
                        if (used[i]) continue;
                        if (overlap(j, i) > best) {
                            best = overlap(j, i);
                            bi = i;
                            bj = j;
                        }
                    }
                }
                if (best < threshold) {
                    ambiguous = true;
                    break;
                }
                next[bj] = bi;
                used[bi] = true;
            }
        }
        if (ambiguous) {
            std::iota(next.begin(), next.end(), 0);
            t.crossings_flagged.push_back(b_samples[s]);
        }
        // compose: branch j sat at sorted slot perm[j]; its continuation is
        // next[perm[j]]
        std::vector<int> np(J);
        for (int j = 0; j < J; ++j) np[j] = next[perm[j]];
        perm = np;
        for (int j = 0; j < J; ++j) t.mu[j][s] = cur.eigenvalues[perm[j]];
    }
    return t;
}

} // namespace specgap
