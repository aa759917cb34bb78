#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hvt/propositions.hpp"
#include "test_util.hpp"

using namespace hvt;
using test::pauli;

namespace {

SystemModel qubit_z() { return make_system({2}, pauli('z'), pauli('z')); }

SystemModel driven_qubit() {
    // Diagonal h0, non-commuting drive in h.
    ComplexMatrix h = pauli('z') + 0.8 * pauli('x');
    return make_system({2}, pauli('z'), h);
}

PropositionExpr atom(std::string label, std::vector<int> idx, double t) {
    return PropositionExpr::make_atom(
        ElementaryProposition{std::move(label), std::move(idx), t});
}

}  // namespace

TEST_CASE("projector on frozen basis index sets") {
    SystemModel model = qubit_z();

    SUBCASE("single index gives a rank-1 projector") {
        // Ascending frozen order puts the -1 eigenvector (|1>) at index 0.
        PartialCharacteristic p = projector(model, {0});
        ComplexMatrix expected(2, 2);
        expected << 0, 0, 0, 1;
        CHECK(frob(ComplexMatrix(p.matrix - expected)) == 0.0);
    }

    SUBCASE("full index set gives the identity") {
        PartialCharacteristic p = projector(model, {0, 1});
        CHECK(frob(ComplexMatrix(p.matrix - ComplexMatrix::Identity(2, 2))) ==
              0.0);
    }

    SUBCASE("trace equals the index count on random sets") {
        SplitMix64 rng(21);
        ComplexMatrix h0 = test::random_hermitian(rng, 8);
        SystemModel big = make_system({8}, h0, h0);
        for (int it = 0; it < 50; ++it) {
            std::vector<int> idx;
            for (int k = 0; k < 8; ++k)
                if (rng.next_double() < 0.5) idx.push_back(k);
            if (idx.empty()) idx.push_back(static_cast<int>(rng.next_below(8)));
            PartialCharacteristic p = projector(big, idx);
            CHECK(std::abs(p.matrix.trace().real() -
                           static_cast<double>(idx.size())) < 1e-10);
            // Projector laws.
            CHECK(frob(ComplexMatrix(p.matrix * p.matrix - p.matrix)) < 1e-10);
            CHECK(frob(ComplexMatrix(p.matrix - p.matrix.adjoint())) < 1e-12);
        }
    }

    SUBCASE("out-of-range and duplicate indices rejected") {
        CHECK_THROWS_AS(projector(model, {2}), Error);
        CHECK_THROWS_AS(projector(model, {0, 0}), Error);
        CHECK_THROWS_AS(projector(model, {}), Error);
    }
}

TEST_CASE("heisenberg evolution of projectors") {
    SystemModel model = driven_qubit();

    SUBCASE("t = 0 unchanged") {
        PartialCharacteristic z = projector(model, {0});
        PartialCharacteristic zt = heisenberg(z, model, 0.0);
        CHECK(frob(ComplexMatrix(zt.matrix - z.matrix)) == 0.0);
    }

    SUBCASE("commuting projector is conserved") {
        // Projector onto an eigenvector of the total Hamiltonian.
        StationaryBasis hb = hermitian_eig(model.h);
        Ket v = hb.eigenvectors.col(0);
        PartialCharacteristic z{v * v.adjoint(), 0.0};
        PartialCharacteristic zt = heisenberg(z, model, 2.3);
        CHECK(frob(ComplexMatrix(zt.matrix - z.matrix)) < 1e-12);
    }

    SUBCASE("rank preserved under conjugation") {
        SplitMix64 rng(31);
        for (int it = 0; it < 50; ++it) {
            ComplexMatrix h0 = test::random_hermitian(rng, 6);
            ComplexMatrix h = test::random_hermitian(rng, 6);
            SystemModel m = make_system({6}, h0, h);
            std::vector<int> idx;
            for (int k = 0; k < 6; ++k)
                if (rng.next_double() < 0.4) idx.push_back(k);
            if (idx.empty()) idx.push_back(0);
            PartialCharacteristic z = projector(m, idx);
            PartialCharacteristic zt =
                heisenberg(z, m, 5.0 * rng.next_double() - 2.5);
            CHECK(std::abs(zt.matrix.trace().real() -
                           static_cast<double>(idx.size())) < 1e-9);
            CHECK(frob(ComplexMatrix(zt.matrix * zt.matrix - zt.matrix)) <
                  1e-9);
        }
    }
}

TEST_CASE("characteristic operators") {
    SystemModel model = qubit_z();

    SUBCASE("NOT rule is exact") {
        PropositionExpr e = PropositionExpr::make_not(atom("A", {0}, 0.0));
        Characteristic x_not = characteristic(e, model);
        Characteristic x = characteristic(atom("A", {0}, 0.0), model);
        // Diagonal frozen basis: entries are exact 0/1.
        CHECK(frob(ComplexMatrix(x_not.matrix + x.matrix -
                                 ComplexMatrix::Identity(2, 2))) == 0.0);
    }

    SUBCASE("commuting same-time conjunction collapses to the product") {
        SplitMix64 rng(41);
        ComplexMatrix h0 = test::random_hermitian(rng, 6);
        SystemModel m = make_system({6}, h0, h0);
        PropositionExpr e = PropositionExpr::make_and(atom("A", {0, 1}, 0.0),
                                                      atom("B", {1, 2}, 0.0));
        Characteristic x = characteristic(e, m);
        ComplexMatrix p = projector(m, {0, 1}).matrix;
        ComplexMatrix q = projector(m, {1, 2}).matrix;
        CHECK(frob(ComplexMatrix(x.matrix - p * q)) < 1e-12);
    }

    SUBCASE("two-time conjunction equals sequential conditioning") {
        SystemModel m = driven_qubit();
        SplitMix64 rng(43);
        for (int it = 0; it < 30; ++it) {
            DensityOperator rho = test::random_density(rng, 2);
            double t1 = rng.next_double(), t2 = t1 + 0.5 + rng.next_double();
            PropositionExpr e = PropositionExpr::make_and(
                atom("A", {0}, t2), atom("B", {1}, t1));
            double joint_prob =
                (characteristic(e, m).matrix * rho.matrix).trace().real();

            // Oracle: condition on B at t1, then measure A at t2.
            ComplexMatrix zb = heisenberg(projector(m, {1}), m, t1).matrix;
            ComplexMatrix conditioned = zb * rho.matrix * zb;
            double pb = conditioned.trace().real();
            ComplexMatrix za = heisenberg(projector(m, {0}), m, t2).matrix;
            double pa_given =
                pb > 0 ? (za * conditioned).trace().real() / pb : 0.0;
            CHECK(joint_prob == doctest::Approx(pb * pa_given).epsilon(1e-10));
        }
    }

    SUBCASE("spectrum of x stays within the probability band") {
        // Valid inputs for the conversion rules: arbitrary Boolean structure
        // over same-time occupation atoms (a commuting lattice), and pure
        // multi-time conjunction chains. Mixed-time disjunctions of
        // non-commuting operands are outside the rules' preconditions and
        // do not obey an operator-level band.
        SplitMix64 rng(47);
        ComplexMatrix h0 = test::random_hermitian(rng, 5);
        SystemModel m = make_system({5}, h0, test::random_hermitian(rng, 5));
        for (int it = 0; it < 150; ++it) {
            auto rand_atom = [&] {
                std::vector<int> idx;
                for (int k = 0; k < 5; ++k)
                    if (rng.next_double() < 0.4) idx.push_back(k);
                if (idx.empty()) idx.push_back(static_cast<int>(rng.next_below(5)));
                return atom("r", idx, 0.25);
            };
            PropositionExpr e = rand_atom();
            for (int d = 0; d < 4; ++d) {
                double u = rng.next_double();
                if (u < 0.34)
                    e = PropositionExpr::make_not(std::move(e));
                else if (u < 0.67)
                    e = PropositionExpr::make_and(std::move(e), rand_atom());
                else
                    e = PropositionExpr::make_or(std::move(e), rand_atom());
            }
            Characteristic x = characteristic(e, m);
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(x.matrix);
            CHECK(es.eigenvalues().minCoeff() > -1e-9);
            CHECK(es.eigenvalues().maxCoeff() < 1.0 + 1e-9);
        }
        for (int it = 0; it < 150; ++it) {
            // Conjunction chain across distinct times.
            PropositionExpr e = atom("a", {static_cast<int>(rng.next_below(5))},
                                     0.0);
            int n_atoms = 1 + static_cast<int>(rng.next_below(3));
            for (int k = 1; k <= n_atoms; ++k)
                e = PropositionExpr::make_and(
                    std::move(e),
                    atom("b", {static_cast<int>(rng.next_below(5))},
                         0.7 * k + rng.next_double() * 0.3));
            Characteristic x = characteristic(e, m);
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(x.matrix);
            CHECK(es.eigenvalues().minCoeff() > -1e-9);
            CHECK(es.eigenvalues().maxCoeff() < 1.0 + 1e-9);
        }
    }
}

TEST_CASE("exclusivity and additivity") {
    SplitMix64 rng(53);
    ComplexMatrix h0 = test::random_hermitian(rng, 6);
    SystemModel m = make_system({6}, h0, h0);

    SUBCASE("exclusivity_check verdicts") {
        ElementaryProposition a{"a", {0}, 0.0};
        ElementaryProposition b{"b", {1}, 0.0};
        ElementaryProposition same{"s", {0}, 0.0};
        ElementaryProposition overlap{"o", {0, 1}, 0.0};
        ElementaryProposition overlap2{"p", {1, 2}, 0.0};
        CHECK(exclusivity_check(a, b, m));
        CHECK_FALSE(exclusivity_check(a, same, m));
        CHECK_FALSE(exclusivity_check(overlap, overlap2, m));
        ElementaryProposition later{"l", {1}, 1.0};
        CHECK_THROWS_AS(exclusivity_check(a, later, m), Error);
    }

    SUBCASE("disjoint equal-time OR is additive") {
        PropositionExpr both = PropositionExpr::make_or(
            atom("A", {0, 2}, 0.0), atom("B", {1, 4}, 0.0));
        Characteristic x_or = characteristic(both, m);
        ComplexMatrix sum = characteristic(atom("A", {0, 2}, 0.0), m).matrix +
                            characteristic(atom("B", {1, 4}, 0.0), m).matrix;
        CHECK(frob(ComplexMatrix(x_or.matrix - sum)) < 1e-13);
    }

    SUBCASE("disjoint-union projector consistency") {
        ComplexMatrix united = projector(m, {0, 1, 4}).matrix;
        ComplexMatrix split =
            projector(m, {0, 4}).matrix + projector(m, {1}).matrix;
        CHECK(frob(ComplexMatrix(united - split)) < 1e-14);

        // Exact on a diagonal h0 where the frozen basis is a permutation.
        ComplexMatrix d4 = ComplexMatrix::Zero(4, 4);
        d4(0, 0) = 3;
        d4(1, 1) = 1;
        d4(2, 2) = 2;
        d4(3, 3) = 0;
        SystemModel diag4 = make_system({4}, d4, ComplexMatrix::Zero(4, 4));
        ComplexMatrix u2 = projector(diag4, {0, 1, 3}).matrix;
        ComplexMatrix s2 =
            projector(diag4, {0, 3}).matrix + projector(diag4, {1}).matrix;
        CHECK(frob(ComplexMatrix(u2 - s2)) == 0.0);
    }
}
