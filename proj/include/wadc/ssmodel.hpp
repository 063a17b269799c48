#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wadc/errors.hpp"

namespace wadc {

using Complex = std::complex<double>;

/// Continuous-time LTI plant  x' = Ax + Bu,  y = Cx + Du.
struct CtStateSpace {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;
    std::vector<std::string> labels;  ///< optional per-state names

    int order() const { return static_cast<int>(A.rows()); }
    int inputs() const { return static_cast<int>(B.cols()); }
    int outputs() const { return static_cast<int>(C.rows()); }

    /// Throws DimensionMismatch / NonFiniteEntry on an inconsistent model.
    void validate() const;
};

/// Discrete-time plant obtained by trapezoidal discretization:
///   x[K+1] = A_p x[K] + B_p (u[K] + u[K+1]),  y[K] = C x[K] + D u[K].
/// Note the input term carries both u[K] and u[K+1]; closed-loop assembly
/// must honor it.
struct DtStateSpace {
    Eigen::MatrixXd A_p;
    Eigen::MatrixXd B_p;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;
    double h = 0.0;  ///< sampling step, seconds

    int order() const { return static_cast<int>(A_p.rows()); }
    int inputs() const { return static_cast<int>(B_p.cols()); }
    int outputs() const { return static_cast<int>(C.rows()); }

    void validate() const;
};

enum class EigDomain { CT, DT };

/// One eigenpair with a canonically phased, unit-norm right eigenvector
/// (first nonzero component real positive), so eigenvectors are directly
/// comparable across matrices.
struct ComplexEig {
    Complex value;
    Eigen::VectorXcd right_vector;
    EigDomain domain = EigDomain::CT;
};

/// Rotates v so its first nonzero component has zero phase, then normalizes.
Eigen::VectorXcd canonical_phase(const Eigen::VectorXcd& v);

/// Trapezoidal (Tustin) discretization:
///   A_p = (2I - Ah)^{-1} (2I + Ah),  B_p = (2I - Ah)^{-1} B h.
/// Throws SingularDiscretization when (2I - Ah) has condition number
/// above 1e12.
DtStateSpace discretize_trapezoidal(const CtStateSpace& ct, double h);

/// DT image of a CT eigenvalue under the trapezoidal map,
/// mu = (2 + lambda h) / (2 - lambda h).
Complex ct_to_dt_eig(Complex lambda, double h);

/// Inverse map, lambda = (2/h)(mu - 1)/(mu + 1).
Complex dt_to_ct_eig(Complex mu, double h);

/// Damping ratio zeta = -Re(lambda)/|lambda| of a CT eigenvalue.
/// Negative zeta signals a growing mode.
double damping_ratio(Complex lambda);

/// Classical-model single-machine infinite-bus benchmark (2 states,
/// speed measurement).
CtStateSpace build_smib();

/// Two-state companion realization whose spectrum is exactly
/// {lambda, conj(lambda)}: A = [[0, 1], [-|lambda|^2, 2 Re lambda]].
/// Stands in for a reduced-order model carrying a single swing mode.
CtStateSpace build_modal_surrogate(Complex lambda, double input_gain,
                                   double output_gain);

/// All eigenpairs of a real matrix, canonically phased.
std::vector<ComplexEig> eig_pairs(const Eigen::MatrixXd& M, EigDomain domain);

/// Least-damped DT mode of the open-loop plant: the eigenvalue of A_p with
/// positive imaginary part and largest magnitude. Throws NoComplexMode.
ComplexEig open_loop_swing_mode(const DtStateSpace& plant);

/// Largest eigenvalue magnitude.
double spectral_radius(const Eigen::MatrixXd& M);

} // namespace wadc
