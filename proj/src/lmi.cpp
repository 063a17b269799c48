#include "wadc/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Eigenvalues>

#include "wadc/ssmodel.hpp"

namespace wadc {

namespace {

double min_eig_sym(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Feasibility search: primal log-det barrier on the max-margin program
//
//     maximize   t
//     over       P_1..P_nv symmetric, tr P_v = d
//     subject to P_i - t I > 0,  P_i - A_i^T P_j A_i - t I > 0
//
// (nv = 1 solves the common-P restriction). Margins are jointly homogeneous
// in the P_i, so any iterate with strictly positive exact margins can be
// rescaled to clear the requested epsilon; certification happens on the fly
// and the exact verifier remains the only source of a Feasible verdict.
// Newton centering follows the path parameter mu downward. Margin-calibrated
// families sit close to the feasibility boundary, where double-precision
// centering breaks down (the Hessian condition grows like the inverse
// squared slack ratio); a long double continuation restarted from the double
// iterate finishes the descent.
// ---------------------------------------------------------------------------

struct Block {
    int var_p = 0;   ///< variable index entering as +P
    int var_q = -1;  ///< variable index entering as -A^T P A (-1 for floors)
    int state = -1;  ///< switching-state index for pair blocks
};

template <typename Scalar>
class BarrierProblem {
public:
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    BarrierProblem(const std::vector<Eigen::MatrixXd>& states, bool common)
        : N_(static_cast<int>(states.size())),
          d_(static_cast<int>(states.front().rows())),
          q_(d_ * (d_ + 1) / 2),
          nv_(common ? 1 : N_) {
        A_.reserve(states.size());
        for (const auto& A : states)
            A_.push_back(A.cast<Scalar>());

        pair_index_.reserve(static_cast<std::size_t>(q_));
        for (int a = 0; a < d_; ++a)
            for (int b = a; b < d_; ++b)
                pair_index_.emplace_back(a, b);

        for (int v = 0; v < nv_; ++v)
            blocks_.push_back({v, -1, -1});
        for (int i = 0; i < N_; ++i) {
            const int vi = common ? 0 : i;
            if (common) {
                blocks_.push_back({vi, vi, i});
            } else {
                for (int j = 0; j < N_; ++j)
                    blocks_.push_back({vi, j, i});
            }
        }
    }

    int vars() const { return nv_ * q_; }       ///< packed P coordinates
    int dim() const { return d_; }
    int n_vars() const { return nv_; }

    Mat unpack(const Vec& y, int v) const {
        Mat P(d_, d_);
        const Scalar inv_s2 = Scalar(1) / std::sqrt(Scalar(2));
        int k = v * q_;
        for (const auto& [a, b] : pair_index_) {
            if (a == b) {
                P(a, a) = y[k];
            } else {
                P(a, b) = P(b, a) = y[k] * inv_s2;
            }
            ++k;
        }
        return P;
    }

    std::vector<Mat> unpack_all(const Vec& y) const {
        std::vector<Mat> Ps;
        Ps.reserve(static_cast<std::size_t>(nv_));
        for (int v = 0; v < nv_; ++v)
            Ps.push_back(unpack(y, v));
        return Ps;
    }

    Vec pack(const std::vector<Mat>& Ps) const {
        Vec y(vars());
        const Scalar s2 = std::sqrt(Scalar(2));
        for (int v = 0; v < nv_; ++v) {
            int k = v * q_;
            for (const auto& [a, b] : pair_index_) {
                y[k++] = (a == b) ? Ps[static_cast<std::size_t>(v)](a, a)
                                  : Ps[static_cast<std::size_t>(v)](a, b) * s2;
            }
        }
        return y;
    }

    Mat block_value(const std::vector<Mat>& Ps, const Block& blk,
                    Scalar t) const {
        Mat S = Ps[static_cast<std::size_t>(blk.var_p)];
        if (blk.var_q >= 0) {
            const Mat& A = A_[static_cast<std::size_t>(blk.state)];
            S -= A.transpose() * Ps[static_cast<std::size_t>(blk.var_q)] * A;
        }
        S.diagonal().array() -= t;
        return S;
    }

    Scalar min_slack(const std::vector<Mat>& Ps, Scalar t) const {
        Scalar m = std::numeric_limits<Scalar>::max();
        for (const auto& blk : blocks_) {
            Mat S = block_value(Ps, blk, t);
            Eigen::SelfAdjointEigenSolver<Mat> es(
                ((S + S.transpose()) * Scalar(0.5)).eval(),
                Eigen::EigenvaluesOnly);
            m = std::min(m, es.eigenvalues().minCoeff());
        }
        return m;
    }

    bool in_domain(const std::vector<Mat>& Ps, Scalar t) const {
        for (const auto& blk : blocks_) {
            Mat S = block_value(Ps, blk, t);
            Eigen::LLT<Mat> llt(((S + S.transpose()) * Scalar(0.5)).eval());
            if (llt.info() != Eigen::Success)
                return false;
        }
        return true;
    }

    /// -sum_b logdet S_b(P, t); +inf outside the domain.
    Scalar barrier(const std::vector<Mat>& Ps, Scalar t) const {
        Scalar phi = 0;
        for (const auto& blk : blocks_) {
            Mat S = block_value(Ps, blk, t);
            Eigen::LLT<Mat> llt(((S + S.transpose()) * Scalar(0.5)).eval());
            if (llt.info() != Eigen::Success)
                return std::numeric_limits<Scalar>::infinity();
            phi -= Scalar(2) * llt.matrixLLT().diagonal().array().log().sum();
        }
        return phi;
    }

    /// Gradient and Hessian of the barrier in (y, t) coordinates. The svec
    /// basis matrices have rank <= 2, so every entry reduces to products of
    /// entries of W = S^{-1}, W^2 and their A-congruences.
    void grad_hess(const std::vector<Mat>& Ps, Scalar t, Vec& g,
                   Mat& H) const {
        const int n = vars();
        g.setZero(n + 1);
        H.setZero(n + 1, n + 1);

        for (const auto& blk : blocks_) {
            Mat S = block_value(Ps, blk, t);
            Eigen::LLT<Mat> llt(((S + S.transpose()) * Scalar(0.5)).eval());
            const Mat W = llt.solve(Mat::Identity(d_, d_));
            const Mat W2 = W * W;

            // t derivatives: d(-logdet)/dt = +tr W, d2/dt2 = +tr W^2
            g[n] += W.trace();
            H(n, n) += W2.trace();

            const int off_p = blk.var_p * q_;
            grad_accumulate(g, off_p, W, Scalar(1));
            hess_accumulate(H, off_p, off_p, W, W, true);
            cross_t_accumulate(H, off_p, W2, n, Scalar(1));

            if (blk.var_q >= 0) {
                const Mat& A = A_[static_cast<std::size_t>(blk.state)];
                const Mat AW = A * W;
                const Mat AWAt = AW * A.transpose();
                const Mat AW2At = A * W2 * A.transpose();
                const int off_q = blk.var_q * q_;
                grad_accumulate(g, off_q, AWAt, Scalar(-1));
                hess_accumulate(H, off_q, off_q, AWAt, AWAt, true);
                hess_cross(H, off_p, off_q, AW);
                cross_t_accumulate(H, off_q, AW2At, n, Scalar(-1));
            }
        }
    }

private:
    // g[k] -= sign * <G, E_k>
    void grad_accumulate(Vec& g, int off, const Mat& G, Scalar sign) const {
        const Scalar s2 = std::sqrt(Scalar(2));
        int k = off;
        for (const auto& [a, b] : pair_index_) {
            g[k++] -= sign * ((a == b) ? G(a, a) : s2 * G(a, b));
        }
    }

    // H(y_k, t) += -sign <G2, E_k>, the mixed derivative with G2 the
    // W^2-congruence for this variable's direction
    void cross_t_accumulate(Mat& H, int off, const Mat& G2, int tcol,
                            Scalar sign) const {
        const Scalar s2 = std::sqrt(Scalar(2));
        int k = off;
        for (const auto& [a, b] : pair_index_) {
            const Scalar v = -sign * ((a == b) ? G2(a, a) : s2 * G2(a, b));
            H(k, tcol) += v;
            H(tcol, k) += v;
            ++k;
        }
    }

    // tr(M E_k M E_l) = 2 s_k s_l (M(b,x) M(y,a) + M(b,y) M(x,a))
    void hess_accumulate(Mat& H, int off_k, int off_l, const Mat& Mk,
                         const Mat& Ml, bool same) const {
        const Scalar inv_s2 = Scalar(1) / std::sqrt(Scalar(2));
        for (int k = 0; k < q_; ++k) {
            const auto [a, b] = pair_index_[static_cast<std::size_t>(k)];
            const Scalar sk = (a == b) ? Scalar(0.5) : inv_s2;
            for (int l = same ? k : 0; l < q_; ++l) {
                const auto [x, y] = pair_index_[static_cast<std::size_t>(l)];
                const Scalar sl = (x == y) ? Scalar(0.5) : inv_s2;
                const Scalar t =
                    Scalar(2) * sk * sl *
                    (Mk(b, x) * Ml(y, a) + Mk(b, y) * Ml(x, a));
                H(off_k + k, off_l + l) += t;
                if (same && l != k)
                    H(off_k + l, off_l + k) += t;
            }
        }
    }

    // cross term between a +E_k direction (variable p) and a -A^T E_l A
    // direction (variable q):
    //   -tr(W E_k W A^T E_l A) = -2 s_k s_l (AW(x,b) AW(y,a) + AW(y,b) AW(x,a))
    void hess_cross(Mat& H, int off_p, int off_q, const Mat& AW) const {
        const Scalar inv_s2 = Scalar(1) / std::sqrt(Scalar(2));
        for (int k = 0; k < q_; ++k) {
            const auto [a, b] = pair_index_[static_cast<std::size_t>(k)];
            const Scalar sk = (a == b) ? Scalar(0.5) : inv_s2;
            for (int l = 0; l < q_; ++l) {
                const auto [x, y] = pair_index_[static_cast<std::size_t>(l)];
                const Scalar sl = (x == y) ? Scalar(0.5) : inv_s2;
                const Scalar t =
                    Scalar(-2) * sk * sl *
                    (AW(x, b) * AW(y, a) + AW(y, b) * AW(x, a));
                H(off_p + k, off_q + l) += t;
                H(off_q + l, off_p + k) += t;
            }
        }
    }

    std::vector<Mat> A_;
    int N_, d_, q_, nv_;
    std::vector<std::pair<int, int>> pair_index_;
    std::vector<Block> blocks_;
};

struct DescentState {
    Eigen::VectorXd y;  ///< packed P coordinates (double for hand-over)
    double t = 0.0;
    double mu = 1.0;
    double best_margin = -std::numeric_limits<double>::infinity();
    int newton_steps = 0;
    bool certified = false;
};

/// Follows the central path of max t - barrier down in mu. Each recentering
/// ends with an exact-margin check in double via `attempt_certify`, which
/// returns true to stop the descent.
template <typename Scalar, typename Certify>
void ipm_descent(const std::vector<Eigen::MatrixXd>& states, bool common,
                 const LmiOptions& options, int budget, double mu_floor,
                 DescentState& st, Certify&& attempt_certify) {
    const double tol = options.tol;
    using Mat = typename BarrierProblem<Scalar>::Mat;
    using Vec = typename BarrierProblem<Scalar>::Vec;

    BarrierProblem<Scalar> prob(states, common);
    const int n = prob.vars();
    const int nv = prob.n_vars();
    const int d = prob.dim();
    const int q = n / nv;

    // trace rows in packed coordinates (diagonal entries carry unit scale)
    Mat Ctr = Mat::Zero(nv, n + 1);
    {
        int k = 0;
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b) {
                if (a == b)
                    for (int v = 0; v < nv; ++v)
                        Ctr(v, v * q + k) = 1;
                ++k;
            }
    }

    Vec y = st.y.cast<Scalar>();
    Scalar t = Scalar(st.t);
    Scalar mu = Scalar(st.mu);

    std::vector<Mat> Ps = prob.unpack_all(y);
    if (!prob.in_domain(Ps, t)) {
        // nudge t down until strictly interior
        t = prob.min_slack(Ps, Scalar(0));
        t -= Scalar(0.05) * std::abs(t) + Scalar(1e-12);
    }

    Vec g;
    Mat H;
    while (st.newton_steps < budget && static_cast<double>(mu) > mu_floor) {
        // recenter at this mu
        bool centered = false;
        for (int inner = 0; inner < 60 && st.newton_steps < budget; ++inner) {
            prob.grad_hess(Ps, t, g, H);
            g[n] -= Scalar(1) / mu;  // objective: maximize t

            Mat K = Mat::Zero(n + 1 + nv, n + 1 + nv);
            K.topLeftCorner(n + 1, n + 1) = H;
            K.topRightCorner(n + 1, nv) = Ctr.transpose();
            K.bottomLeftCorner(nv, n + 1) = Ctr;
            Vec rhs = Vec::Zero(n + 1 + nv);
            rhs.head(n + 1) = -g;

            Vec sol;
            Scalar reg = 0;
            for (int attempt = 0; attempt < 8; ++attempt) {
                Mat Kr = K;
                if (reg > 0)
                    Kr.topLeftCorner(n + 1, n + 1).diagonal().array() += reg;
                sol = Kr.ldlt().solve(rhs);
                if (sol.allFinite())
                    break;
                reg = (reg == 0) ? Scalar(1e-13) * H.diagonal().maxCoeff()
                                 : reg * 100;
            }
            if (!sol.allFinite())
                return;  // numerically dead at this precision

            const Vec dz = sol.head(n + 1);
            const Scalar decrement2 = -g.dot(dz);
            ++st.newton_steps;
            if (!(decrement2 > 0) || decrement2 < Scalar(tol)) {
                centered = true;
                break;
            }

            const Scalar phi0 =
                prob.barrier(Ps, t) - t / mu;
            Scalar step = 1;
            bool stepped = false;
            for (int ls = 0; ls < 80; ++ls) {
                const Vec yt = y + step * dz.head(n);
                const Scalar tt = t + step * dz[n];
                const auto trial = prob.unpack_all(yt);
                if (prob.in_domain(trial, tt)) {
                    const Scalar phi = prob.barrier(trial, tt) - tt / mu;
                    if (phi <= phi0 - Scalar(0.25) * step * decrement2) {
                        y = yt;
                        t = tt;
                        Ps = trial;
                        stepped = true;
                        break;
                    }
                }
                step *= Scalar(0.5);
            }
            if (!stepped) {
                centered = true;  // no productive step left at this precision
                break;
            }
        }

        // hand-over snapshot and exact certification attempt
        st.y = y.template cast<double>();
        st.t = static_cast<double>(t);
        st.mu = static_cast<double>(mu);
        {
            BarrierProblem<double> dprob(states, common);
            const auto Pd = dprob.unpack_all(st.y);
            const double margin = dprob.min_slack(Pd, 0.0);
            st.best_margin = std::max(st.best_margin, margin);
            if (options.trace)
                std::fprintf(stderr,
                             "[lmi] mu %.3e  t % .6e  margin % .6e  newton %d\n",
                             st.mu, st.t, margin, st.newton_steps);
            if (margin > 0.0) {
                std::vector<Eigen::MatrixXd> cand(Pd.begin(), Pd.end());
                if (attempt_certify(cand)) {
                    st.certified = true;
                    return;
                }
            }
        }
        if (!centered)
            return;
        mu *= Scalar(0.2);
    }
}

LmiVerdict solve_impl(const std::vector<Eigen::MatrixXd>& states, bool common,
                      const LmiOptions& options) {
    if (states.empty())
        throw DimensionMismatch("no switching states given");
    const int d = static_cast<int>(states.front().rows());
    for (const auto& A : states)
        if (A.rows() != d || A.cols() != d)
            throw DimensionMismatch("switching states must share one dimension");

    const double eps =
        options.epsilon > 0.0 ? options.epsilon : default_epsilon(states);

    LmiVerdict verdict;

    // necessary condition: every individual state Schur stable
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (spectral_radius(states[i]) >= 1.0 - 1e-9) {
            verdict.outcome = LmiOutcome::NecessaryFail;
            verdict.witness = static_cast<int>(i);
            verdict.detail = "state " + std::to_string(i) +
                             " is not Schur stable; no positive definite P "
                             "can satisfy the block inequality";
            return verdict;
        }
    }

    const int nv = common ? 1 : static_cast<int>(states.size());
    if (!common && nv * d * (d + 1) / 2 > options.max_multi_p_vars) {
        verdict.outcome = LmiOutcome::Undetermined;
        verdict.detail = "multi-P problem too large for the direct solver";
        return verdict;
    }

    const auto try_certify =
        [&](const std::vector<Eigen::MatrixXd>& cand)
        -> std::optional<LmiCertificate> {
        LmiCertificate cert;
        for (std::size_t i = 0; i < states.size(); ++i) {
            const auto& P = common ? cand.front() : cand[i];
            cert.P_list.push_back(0.5 * (P + P.transpose()));
        }
        const int N = static_cast<int>(states.size());
        cert.margins.resize(N, N);
        double mmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) {
                const Eigen::MatrixXd E =
                    cert.P_list[static_cast<std::size_t>(i)] -
                    states[static_cast<std::size_t>(i)].transpose() *
                        cert.P_list[static_cast<std::size_t>(j)] *
                        states[static_cast<std::size_t>(i)];
                cert.margins(i, j) = min_eig_sym(E);
                mmin = std::min(mmin, cert.margins(i, j));
            }
        }
        cert.min_P_eig = std::numeric_limits<double>::infinity();
        for (const auto& P : cert.P_list)
            cert.min_P_eig = std::min(cert.min_P_eig, min_eig_sym(P));
        mmin = std::min(mmin, cert.min_P_eig);
        if (mmin <= 0.0)
            return std::nullopt;
        // margins are homogeneous in P: rescale to clear epsilon
        const double scale = 2.0 * eps / mmin;
        for (auto& P : cert.P_list)
            P *= scale;
        cert.margins *= scale;
        cert.min_P_eig *= scale;
        if (!lmi_verify(states, cert, eps))
            return std::nullopt;
        return cert;
    };

    std::optional<LmiCertificate> found;
    const auto accept = [&](const std::vector<Eigen::MatrixXd>& cand) {
        found = try_certify(cand);
        return found.has_value();
    };

    DescentState st;
    {
        BarrierProblem<double> prob(states, common);
        std::vector<Eigen::MatrixXd> init(
            static_cast<std::size_t>(nv), Eigen::MatrixXd::Identity(d, d));
        st.y = prob.pack(init);
        const double m0 = prob.min_slack(init, 0.0);
        st.t = m0 - 0.05 * std::abs(m0) - 1e-6;
        st.mu = std::max(1.0, std::abs(st.t));
    }

    const int phase1 = std::max(options.max_iter / 2, 1);
    ipm_descent<double>(states, common, options, phase1, 1e-10, st, accept);

    if (!st.certified && st.best_margin > -1e-3 * d &&
        st.newton_steps < options.max_iter) {
        // near-feasible stall: continue in extended precision
        st.mu = std::max(st.mu * 0.2, 1e-18);
        ipm_descent<long double>(states, common, options, options.max_iter,
                                 1e-18, st, accept);
    }

    if (st.certified && found) {
        verdict.outcome = LmiOutcome::Feasible;
        verdict.certificate = std::move(*found);
        verdict.iterations = st.newton_steps;
        verdict.residual = 0.0;
        return verdict;
    }

    verdict.outcome = LmiOutcome::Undetermined;
    verdict.iterations = st.newton_steps;
    verdict.residual = std::max(0.0, -st.best_margin);
    verdict.detail =
        "no strictly feasible point reached; feasibility not refuted";
    return verdict;
}

} // namespace

double default_epsilon(const std::vector<Eigen::MatrixXd>& states) {
    double scale = 1.0;
    for (const auto& A : states) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        scale = std::max(scale, svd.singularValues().maxCoeff());
    }
    return 1e-6 * scale;
}

Eigen::MatrixXd lmi_block_form(const Eigen::MatrixXd& P_i,
                               const Eigen::MatrixXd& P_j,
                               const Eigen::MatrixXd& A_i) {
    const Eigen::Index d = P_i.rows();
    Eigen::MatrixXd blockmat(2 * d, 2 * d);
    blockmat.topLeftCorner(d, d) = P_i;
    blockmat.topRightCorner(d, d) = A_i.transpose() * P_j;
    blockmat.bottomLeftCorner(d, d) = P_j * A_i;
    blockmat.bottomRightCorner(d, d) = P_j;
    return blockmat;
}

bool lmi_verify(const std::vector<Eigen::MatrixXd>& states,
                const LmiCertificate& cert, double epsilon) {
    if (epsilon <= 0.0)
        throw InvalidRange("verifier needs epsilon > 0");
    if (cert.P_list.size() != states.size())
        throw DimensionMismatch("certificate size does not match state count");
    const Eigen::Index d = states.front().rows();
    for (const auto& P : cert.P_list) {
        if (P.rows() != d || P.cols() != d)
            throw DimensionMismatch("certificate dimension mismatch");
        const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
        if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
            return false;
        if (min_eig_sym(P) < epsilon)
            return false;
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (std::size_t j = 0; j < states.size(); ++j) {
            const Eigen::MatrixXd E =
                cert.P_list[i] -
                states[i].transpose() * cert.P_list[j] * states[i];
            if (min_eig_sym(E) < epsilon)
                return false;
        }
    }
    return true;
}

LmiVerdict lmi_solve(const std::vector<Eigen::MatrixXd>& states,
                     const LmiOptions& options) {
    // A common-P certificate is a valid (and far cheaper) witness for the
    // multi-P inequality, so try the restriction first.
    LmiVerdict common = solve_impl(states, /*common=*/true, options);
    if (common.outcome == LmiOutcome::Feasible ||
        common.outcome == LmiOutcome::NecessaryFail)
        return common;
    LmiVerdict multi = solve_impl(states, /*common=*/false, options);
    multi.iterations += common.iterations;
    return multi;
}

LmiVerdict common_p_solve(const std::vector<Eigen::MatrixXd>& states,
                          const LmiOptions& options) {
    return solve_impl(states, /*common=*/true, options);
}

} // namespace wadc
