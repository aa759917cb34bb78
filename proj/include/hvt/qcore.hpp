#ifndef HVT_QCORE_HPP
#define HVT_QCORE_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hvt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Thrown on contract violations (bad dimensions, non-Hermitian input, ...).
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical tolerances. Frobenius-norm based where a matrix is compared,
/// relative to max(1, scale of the operands). Overridable per scenario.
struct Tolerances {
    double herm = 1e-10;
    double trace = 1e-10;
    double orth = 1e-10;
    double eig = 1e-10;
    double unit = 1e-10;
    double psd = 1e-9;
    double proj = 1e-10;
    double compat = 1e-9;   // relative compatibility residual threshold
    double op = 1e-10;      // operator-identity threshold (Frobenius)
    double det = 1e-9;      // deterministic/exclusive/independent threshold
    double div = 1e-12;     // smallest conditioning probability
    double comm = 1e-10;    // commutator-with-H0 threshold
    double norm = 1e-10;    // ket normalization
};

/// Orthonormal eigenbasis of the non-interacting Hamiltonian, eigenvalues
/// ascending. The column ordering is frozen once computed; index sets in
/// proposition definitions always refer to this ordering.
struct StationaryBasis {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;  // columns

    Eigen::Index dim() const { return eigenvalues.size(); }
};

struct DensityOperator {
    ComplexMatrix matrix;

    Eigen::Index dim() const { return matrix.rows(); }
};

struct SystemModel {
    std::vector<int> subsystem_dims;
    ComplexMatrix h0;
    ComplexMatrix h;
    StationaryBasis basis;
    Tolerances tol;

    Eigen::Index dim() const { return h0.rows(); }
};

inline double frob(const ComplexMatrix& m) { return m.norm(); }

bool is_hermitian(const ComplexMatrix& m, double tol);

/// Kronecker product.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);
Ket tensor_product(const Ket& a, const Ket& b);

/// Trace out every factor except `keep`. `dims` must multiply to rho.dim.
DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<int>& dims, int keep);

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// Exactly diagonal input takes a fast path that keeps the basis vectors
/// exact 0/1 unit columns (a permutation), so projectors built from a
/// diagonal h0 have exact entries.
StationaryBasis hermitian_eig(const ComplexMatrix& h, double herm_tol = 1e-10);

/// exp(-i t h) for Hermitian h, via eigendecomposition.
ComplexMatrix unitary_evolution(const ComplexMatrix& h, double t,
                                double herm_tol = 1e-10);

/// U(t) rho U(t)^dagger under the model's total Hamiltonian.
DensityOperator evolve_density(const DensityOperator& rho,
                               const SystemModel& model, double t);

DensityOperator density_from_ket(const Ket& psi);

/// Validates and freezes a model: Hermiticity of h0 and h, dimension
/// consistency with subsystem_dims, stationary basis from h0.
SystemModel make_system(std::vector<int> subsystem_dims, ComplexMatrix h0,
                        ComplexMatrix h, Tolerances tol = {});

void validate_density(const DensityOperator& rho, const Tolerances& tol);

struct ScenarioDocument;  // defined in scenario_doc.hpp

/// Builds a SystemModel from a parsed scenario document (physics-level
/// validation; schema validation happens at parse time).
SystemModel load_system(const ScenarioDocument& doc);

}  // namespace hvt

#endif
