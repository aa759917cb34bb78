#include "hvt/qcore.hpp"

#include <algorithm>
#include <numeric>

#include "hvt/scenario_doc.hpp"

namespace hvt {

bool is_hermitian(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    double scale = std::max(1.0, frob(m));
    return frob(ComplexMatrix(m - m.adjoint())) <= tol * scale;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}

Ket tensor_product(const Ket& a, const Ket& b) {
    Ket out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<int>& dims, int keep) {
    Eigen::Index total = 1;
    for (int d : dims) {
        if (d <= 0) throw Error("partial_trace: nonpositive factor dimension");
        total *= d;
    }
    if (total != rho.dim())
        throw Error("partial_trace: factor dimensions do not multiply to " +
                    std::to_string(rho.dim()));
    if (keep < 0 || keep >= static_cast<int>(dims.size()))
        throw Error("partial_trace: keep index out of range");

    const int dk = dims[keep];
    // Row-major strides: index = sum_f i_f * stride_f.
    std::vector<Eigen::Index> stride(dims.size());
    Eigen::Index s = 1;
    for (int f = static_cast<int>(dims.size()) - 1; f >= 0; --f) {
        stride[f] = s;
        s *= dims[f];
    }
    const Eigen::Index rest = total / dk;

    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    // Enumerate the traced multi-index once, then sweep the kept factor.
    std::vector<int> idx(dims.size(), 0);
    for (Eigen::Index r = 0; r < rest; ++r) {
        Eigen::Index rem = r, base = 0;
        for (int f = static_cast<int>(dims.size()) - 1; f >= 0; --f) {
            if (f == keep) continue;
            Eigen::Index v = rem % dims[f];
            rem /= dims[f];
            base += v * stride[f];
        }
        for (int i = 0; i < dk; ++i)
            for (int j = 0; j < dk; ++j)
                out(i, j) += rho.matrix(base + i * stride[keep],
                                        base + j * stride[keep]);
    }
    return DensityOperator{std::move(out)};
}

namespace {

bool exactly_diagonal(const ComplexMatrix& h) {
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j) {
            if (i != j && h(i, j) != Complex(0.0, 0.0)) return false;
            if (i == j && h(i, j).imag() != 0.0) return false;
        }
    return true;
}

}  // namespace

StationaryBasis hermitian_eig(const ComplexMatrix& h, double herm_tol) {
    if (!is_hermitian(h, herm_tol))
        throw Error("hermitian_eig: input is not Hermitian within tolerance");

    const Eigen::Index n = h.rows();
    if (exactly_diagonal(h)) {
        std::vector<Eigen::Index> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) {
                             return h(a, a).real() < h(b, b).real();
                         });
        StationaryBasis basis;
        basis.eigenvalues.resize(n);
        basis.eigenvectors = ComplexMatrix::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            basis.eigenvalues(k) = h(order[k], order[k]).real();
            basis.eigenvectors(order[k], k) = 1.0;
        }
        return basis;
    }

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw Error("hermitian_eig: eigensolver failed to converge");
    return StationaryBasis{solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix unitary_evolution(const ComplexMatrix& h, double t,
                                double herm_tol) {
    StationaryBasis b = hermitian_eig(h, herm_tol);
    const Eigen::Index n = h.rows();
    Ket phases(n);
    for (Eigen::Index k = 0; k < n; ++k)
        phases(k) = std::exp(Complex(0.0, -t * b.eigenvalues(k)));
    return b.eigenvectors * phases.asDiagonal() * b.eigenvectors.adjoint();
}

DensityOperator evolve_density(const DensityOperator& rho,
                               const SystemModel& model, double t) {
    if (rho.dim() != model.dim())
        throw Error("evolve_density: dimension mismatch");
    if (t == 0.0) return rho;
    ComplexMatrix u = unitary_evolution(model.h, t, model.tol.herm);
    return DensityOperator{u * rho.matrix * u.adjoint()};
}

DensityOperator density_from_ket(const Ket& psi) {
    double n = psi.norm();
    if (!(n > 0.0)) throw Error("density_from_ket: zero vector");
    Ket v = psi / n;
    return DensityOperator{v * v.adjoint()};
}

void validate_density(const DensityOperator& rho, const Tolerances& tol) {
    const ComplexMatrix& m = rho.matrix;
    if (m.rows() != m.cols()) throw Error("density operator must be square");
    if (!m.allFinite()) throw Error("density operator has non-finite entries");
    if (!is_hermitian(m, tol.herm))
        throw Error("density operator is not Hermitian within tolerance");
    if (std::abs(m.trace().real() - 1.0) > tol.trace ||
        std::abs(m.trace().imag()) > tol.trace)
        throw Error("density operator trace differs from 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    if (solver.eigenvalues().minCoeff() < -tol.psd)
        throw Error("density operator has a negative eigenvalue beyond tolerance");
}

SystemModel make_system(std::vector<int> subsystem_dims, ComplexMatrix h0,
                        ComplexMatrix h, Tolerances tol) {
    if (subsystem_dims.empty())
        throw Error("make_system: subsystem_dims is empty");
    Eigen::Index prod = 1;
    for (int d : subsystem_dims) {
        if (d <= 0) throw Error("make_system: nonpositive subsystem dimension");
        prod *= d;
    }
    if (h0.rows() != h0.cols() || h0.rows() != prod)
        throw Error("make_system: h0 dimension " + std::to_string(h0.rows()) +
                    "x" + std::to_string(h0.cols()) +
                    " does not match subsystem_dims product " +
                    std::to_string(prod));
    if (h.size() == 0) h = h0;
    if (h.rows() != h0.rows() || h.cols() != h0.cols())
        throw Error("make_system: h dimension does not match h0");
    if (!h0.allFinite() || !h.allFinite())
        throw Error("make_system: non-finite Hamiltonian entries");
    if (!is_hermitian(h0, tol.herm))
        throw Error("make_system: h0 is not Hermitian within tolerance");
    if (!is_hermitian(h, tol.herm))
        throw Error("make_system: h is not Hermitian within tolerance");

    SystemModel model;
    model.subsystem_dims = std::move(subsystem_dims);
    model.h0 = std::move(h0);
    model.h = std::move(h);
    model.tol = tol;
    model.basis = hermitian_eig(model.h0, tol.herm);
    return model;
}

SystemModel load_system(const ScenarioDocument& doc) {
    return make_system(doc.subsystem_dims, doc.h0, doc.h, doc.tolerances);
}

}  // namespace hvt
