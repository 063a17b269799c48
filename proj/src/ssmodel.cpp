#include "wadc/ssmodel.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace wadc {

namespace {

void require_finite(const Eigen::MatrixXd& M, const char* name) {
    if (!M.allFinite())
        throw NonFiniteEntry(std::string(name) + " contains a non-finite entry");
}

} // namespace

void CtStateSpace::validate() const {
    if (A.rows() != A.cols())
        throw DimensionMismatch("A must be square");
    if (B.rows() != A.rows())
        throw DimensionMismatch("B row count must match A");
    if (C.cols() != A.cols())
        throw DimensionMismatch("C column count must match A");
    if (D.rows() != C.rows() || D.cols() != B.cols())
        throw DimensionMismatch("D must be outputs x inputs");
    require_finite(A, "A");
    require_finite(B, "B");
    require_finite(C, "C");
    require_finite(D, "D");
    if (!labels.empty() && labels.size() != static_cast<std::size_t>(A.rows()))
        throw DimensionMismatch("labels length must equal state count");
}

void DtStateSpace::validate() const {
    if (h <= 0.0)
        throw DimensionMismatch("sampling step h must be positive");
    if (A_p.rows() != A_p.cols())
        throw DimensionMismatch("A_p must be square");
    if (B_p.rows() != A_p.rows())
        throw DimensionMismatch("B_p row count must match A_p");
    if (C.cols() != A_p.cols())
        throw DimensionMismatch("C column count must match A_p");
    if (D.rows() != C.rows() || D.cols() != B_p.cols())
        throw DimensionMismatch("D must be outputs x inputs");
    require_finite(A_p, "A_p");
    require_finite(B_p, "B_p");
}

Eigen::VectorXcd canonical_phase(const Eigen::VectorXcd& v) {
    const double vmax = v.cwiseAbs().maxCoeff();
    Eigen::VectorXcd out = v;
    if (vmax == 0.0)
        return out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > 1e-12 * vmax) {
            out *= std::conj(v[i]) / a;
            break;
        }
    }
    return out / out.norm();
}

DtStateSpace discretize_trapezoidal(const CtStateSpace& ct, double h) {
    ct.validate();
    if (h <= 0.0)
        throw SingularDiscretization("step h must be positive");

    const int n = ct.order();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd M = 2.0 * I - ct.A * h;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || smax / smin > 1e12)
        throw SingularDiscretization("(2I - Ah) is numerically singular");

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    DtStateSpace dt;
    dt.A_p = lu.solve(2.0 * I + ct.A * h);
    dt.B_p = lu.solve(ct.B * h);
    dt.C = ct.C;
    dt.D = ct.D;
    dt.h = h;
    return dt;
}

Complex ct_to_dt_eig(Complex lambda, double h) {
    const Complex den = 2.0 - lambda * h;
    if (std::abs(den) < 1e-12 * std::max(1.0, std::abs(lambda * h)))
        throw PoleAtNyquist("lambda*h too close to 2");
    return (2.0 + lambda * h) / den;
}

Complex dt_to_ct_eig(Complex mu, double h) {
    const Complex den = mu + 1.0;
    if (std::abs(den) < 1e-12 * std::max(1.0, std::abs(mu)))
        throw PoleAtMinusOne("mu too close to -1");
    return (2.0 / h) * (mu - 1.0) / den;
}

double damping_ratio(Complex lambda) {
    const double mag = std::abs(lambda);
    if (mag < 1e-300)
        throw ZeroEigenvalue("damping ratio undefined at lambda = 0");
    return -lambda.real() / mag;
}

CtStateSpace build_smib() {
    CtStateSpace ct;
    ct.A.resize(2, 2);
    ct.A << 0.0, 1.0,
            -112.5, -0.628;
    ct.B.resize(2, 1);
    ct.B << 0.0, -62.83;
    ct.C.resize(1, 2);
    ct.C << 0.0, 1.0;
    ct.D = Eigen::MatrixXd::Zero(1, 1);
    ct.labels = {"delta", "omega"};
    return ct;
}

CtStateSpace build_modal_surrogate(Complex lambda, double input_gain,
                                   double output_gain) {
    if (lambda.imag() <= 0.0)
        throw DimensionMismatch("surrogate mode must have Im(lambda) > 0");
    CtStateSpace ct;
    ct.A.resize(2, 2);
    ct.A << 0.0, 1.0,
            -std::norm(lambda), 2.0 * lambda.real();
    ct.B.resize(2, 1);
    ct.B << 0.0, input_gain;
    ct.C.resize(1, 2);
    ct.C << 0.0, output_gain;
    ct.D = Eigen::MatrixXd::Zero(1, 1);
    ct.labels = {"mode_pos", "mode_vel"};
    return ct;
}

std::vector<ComplexEig> eig_pairs(const Eigen::MatrixXd& M, EigDomain domain) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success)
        throw Error("eigendecomposition failed");
    std::vector<ComplexEig> out;
    out.reserve(static_cast<std::size_t>(M.rows()));
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        ComplexEig e;
        e.value = es.eigenvalues()[i];
        e.right_vector = canonical_phase(es.eigenvectors().col(i));
        e.domain = domain;
        out.push_back(std::move(e));
    }
    return out;
}

ComplexEig open_loop_swing_mode(const DtStateSpace& plant) {
    const auto eigs = eig_pairs(plant.A_p, EigDomain::DT);
    const ComplexEig* best = nullptr;
    for (const auto& e : eigs) {
        if (e.value.imag() <= 1e-12)
            continue;
        if (!best || std::abs(e.value) > std::abs(best->value))
            best = &e;
    }
    if (!best)
        throw NoComplexMode("plant has no oscillatory mode");
    return *best;
}

double spectral_radius(const Eigen::MatrixXd& M) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace wadc
