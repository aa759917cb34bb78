// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hvt/quantities.hpp"
#include "hvt/scenarios.hpp"
#include "hvt/trials.hpp"
#include "test_util.hpp"

using namespace hvt;
using test::pauli;

namespace {

int g_failures = 0;

void criterion(const std::string& name, double budget_seconds,
               const std::function<bool(std::string&)>& body) {
    std::string detail;
    auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed > budget_seconds) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over budget ") +
                  std::to_string(budget_seconds) + " s";
    }
    std::printf("[%s] %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
                elapsed, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

SystemModel zero_model(int dim) {
    return make_system({dim}, ComplexMatrix::Zero(dim, dim),
                       ComplexMatrix::Zero(dim, dim));
}

ComplexMatrix spin_proj(const std::array<double, 3>& u, int s) {
    ComplexMatrix m = ComplexMatrix::Identity(2, 2) +
                      double(s) * (u[0] * pauli('x') + u[1] * pauli('y') +
                                   u[2] * pauli('z'));
    return m / 2.0;
}

struct SingletSetup {
    SystemModel model = zero_model(4);
    Ensemble ens;
    SingletSetup() {
        Ket s(4);
        const double r = std::sqrt(2.0);
        s << 0.0, 1.0 / r, -1.0 / r, 0.0;
        ens = Ensemble{density_from_ket(s), "singlet"};
    }
    Event on1(const std::array<double, 3>& u, int s) const {
        return Event{"on1", tensor_product(spin_proj(u, s),
                                           ComplexMatrix::Identity(2, 2)),
                     0.0};
    }
    Event on2(const std::array<double, 3>& u, int s) const {
        return Event{"on2", tensor_product(ComplexMatrix::Identity(2, 2),
                                           spin_proj(u, s)),
                     0.0};
    }
};

}  // namespace

int main() {
    criterion("1. singlet joint law over 100 random direction pairs", 1.0,
              [](std::string& detail) {
        SingletSetup s;
        SplitMix64 rng(2001);
        double worst = 0.0;
        for (int it = 0; it < 100; ++it) {
            auto u1 = test::random_direction(rng);
            auto u2 = test::random_direction(rng);
            double dot = u1[0] * u2[0] + u1[1] * u2[1] + u1[2] * u2[2];
            for (int s1 : {+1, -1})
                for (int s2 : {+1, -1}) {
                    double p = joint(s.ens, s.model,
                                     {s.on1(u1, s1), s.on2(u2, s2)});
                    double expected = (1.0 - s1 * s2 * dot) / 4.0;
                    worst = std::max(worst, std::abs(p - expected));
                }
        }
        detail = "worst deviation " + std::to_string(worst);
        return worst < 1e-12;
    });

    criterion("2. CHSH combination = 2*sqrt(2) and per-trial sum refused", 1.0,
              [](std::string& detail) {
        ScenarioReport r = singlet_chsh(12345, 100);  // gate checks only
        const CheckResult* chsh = r.check("CHSH combination");
        const CheckResult* refused =
            r.check("per-trial CHSH sum is refused by the arithmetic gate");
        const CheckResult* named =
            r.check("refusal names a same-subsystem direction pair");
        if (!chsh || !refused || !named) {
            detail = "missing checks in the report";
            return false;
        }
        bool value_ok = std::abs(chsh->actual - 2.0 * std::sqrt(2.0)) < 1e-12;
        detail = "combination " + std::to_string(chsh->actual) + "; " +
                 refused->note;
        return value_ok && refused->pass && named->pass;
    });

    criterion("3. same-direction deterministic relations on 1e4 trials", 5.0,
              [](std::string& detail) {
        SingletSetup s;
        const std::array<double, 3> u{0.36, -0.48, 0.8};  // unit direction
        Event up2 = s.on2(u, +1);
        Event dn1 = s.on1(u, -1);

        double c1 = conditional(s.ens, s.model, {up2}, {dn1});
        double c2 = conditional(s.ens, s.model, {dn1}, {up2});
        if (std::abs(c1 - 1.0) > 1e-9 || std::abs(c2 - 1.0) > 1e-9) {
            detail = "trace conditionals differ from 1";
            return false;
        }

        HistorySpec spec;
        spec.times = {0.0};
        std::vector<Event> cells;
        for (int s1 : {+1, -1})
            for (int s2 : {+1, -1})
                cells.push_back(Event{
                    "cell", tensor_product(spin_proj(u, s1), spin_proj(u, s2)),
                    0.0});
        spec.partitions = {cells};
        auto trials = sample_trials(s.ens, s.model, spec, 10000, 777);
        long violations = 0;
        for (const auto& trial : trials) {
            int outcome = trial.outcomes[0];
            int x_up2 = (outcome == 0 || outcome == 2) ? 1 : 0;
            int x_dn1 = (outcome >= 2) ? 1 : 0;
            if (x_up2 != x_dn1) ++violations;
        }
        detail = std::to_string(violations) + " violations";
        return violations == 0;
    });

    criterion("4. always-true compatibility theorem on 1000 random instances",
              60.0, [](std::string& detail) {
        SplitMix64 rng(4004);
        double worst = 0.0;
        for (int it = 0; it < 1000; ++it) {
            int dim = 2 + static_cast<int>(rng.next_below(15));  // 2..16
            ComplexMatrix h0 = test::random_hermitian(rng, dim);
            SystemModel model = make_system({dim}, h0, h0);
            int support = 1 + static_cast<int>(rng.next_below(dim));
            ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
            double total = 0.0;
            int mixture = 1 + static_cast<int>(rng.next_below(3));
            for (int sv = 0; sv < mixture; ++sv) {
                Ket mix = Ket::Zero(dim);
                for (int q = 0; q < support; ++q)
                    mix(q) = Complex(rng.next_double() - 0.5,
                                     rng.next_double() - 0.5);
                if (mix.norm() == 0.0) mix(0) = 1.0;
                Ket v = model.basis.eigenvectors * (mix / mix.norm());
                double w = rng.next_double() + 0.05;
                rho += w * (v * v.adjoint());
                total += w;
            }
            rho /= total;
            int n_props = 2 + static_cast<int>(rng.next_below(3));  // 2..4
            std::vector<Event> atoms;
            for (int p = 0; p < n_props; ++p) {
                std::vector<int> idx;
                for (int q = 0; q < support; ++q) idx.push_back(q);
                for (int q = support; q < dim; ++q)
                    if (rng.next_double() < 0.5) idx.push_back(q);
                atoms.push_back(Event{"c", projector(model, idx).matrix, 0.0});
            }
            CompatReport r =
                compat_check(model, DensityOperator{rho}, atoms, 0.0);
            worst = std::max(worst, r.worst_residual);
            if (!r.compatible || r.worst_residual >= 1e-10) {
                detail = "instance " + std::to_string(it) + " residual " +
                         std::to_string(r.worst_residual);
                return false;
            }
        }
        detail = "worst residual " + std::to_string(worst);
        return true;
    });

    criterion("5. second-order closed form on 1000 random rank-1 pairs", 10.0,
              [](std::string& detail) {
        SplitMix64 rng(5005);
        double worst = 0.0;
        for (int it = 0; it < 1000; ++it) {
            int dim = 2 + static_cast<int>(rng.next_below(11));
            SystemModel m = zero_model(dim);
            Ket phi1 = test::random_ket(rng, dim);
            Ket phi2 = test::random_ket(rng, dim);
            DensityOperator rho = test::random_density(rng, dim);
            CompatReport r =
                compat_check(m, rho,
                             {Event{"p1", phi1 * phi1.adjoint(), 0.0},
                              Event{"p2", phi2 * phi2.adjoint(), 0.0}},
                             0.0);
            double delta_swap = r.subsets[0].per_permutation[1].delta;
            double overlap = std::norm(phi1.dot(phi2));
            double d1 = (phi1.adjoint() * rho.matrix * phi1)(0, 0).real();
            double d2 = (phi2.adjoint() * rho.matrix * phi2)(0, 0).real();
            worst = std::max(worst,
                             std::abs(delta_swap - overlap * (d1 - d2)));
        }
        detail = "worst deviation " + std::to_string(worst);
        return worst < 1e-10;
    });

    criterion("6. sampler fidelity: chi-square at 0.001 and byte-identical rerun",
              30.0, [](std::string& detail) {
        SystemModel m =
            make_system({2}, pauli('z'), pauli('z') + 0.8 * pauli('x'));
        ComplexMatrix rho0 = ComplexMatrix::Zero(2, 2);
        rho0(0, 0) = 1.0;
        Ensemble ens{DensityOperator{rho0}, "ground"};
        HistorySpec spec =
            make_history(m, {0.7, 1.9}, {{{0}, {1}}, {{0}, {1}}});
        std::vector<double> probs = history_distribution(ens, m, spec);

        const std::size_t n = 100000;
        auto trials = sample_trials(ens, m, spec, n, 20240608);
        std::vector<double> counts(probs.size(), 0.0);
        for (const auto& t : trials)
            counts[history_index(spec, t.outcomes)] += 1.0;
        double chi2 = 0.0;
        int dof = -1;
        for (std::size_t h = 0; h < probs.size(); ++h) {
            double expected = probs[h] * static_cast<double>(n);
            if (expected < 1e-9) continue;
            chi2 += (counts[h] - expected) * (counts[h] - expected) / expected;
            ++dof;
        }
        double threshold = test::chi_square_quantile(dof, 0.999);
        bool fit_ok = chi2 < threshold;

        auto rerun = sample_trials(ens, m, spec, n, 20240608);
        bool identical =
            trials_to_csv(trials, spec) == trials_to_csv(rerun, spec);
        detail = "chi2 " + std::to_string(chi2) + " < " +
                 std::to_string(threshold) +
                 (identical ? ", rerun identical" : ", rerun DIFFERS");
        return fit_ok && identical;
    });

    criterion("7. decay rate within 10% of the golden-rule value", 60.0,
              [](std::string& detail) {
        ScenarioReport r = decay_toy(64, 0.318, 40.0);
        const CheckResult* fit =
            r.check("fitted decay rate over the pre-revival window");
        if (!fit) {
            detail = "missing fit check";
            return false;
        }
        detail = "gamma_fit " + std::to_string(fit->actual) + " vs golden " +
                 std::to_string(fit->expected);
        return fit->pass && r.all_passed();
    });

    criterion("8. light-quantum chains: Fock equality and coherent ratio", 60.0,
              [](std::string& detail) {
        ScenarioReport fock = light_quantum(FieldMode::fock(), 0.05, 6.0);
        ScenarioReport coh = light_quantum(FieldMode::coherent(1.0), 0.05, 6.0);
        const CheckResult* eq =
            fock.check("P(absorbed) = P(ionized) for the one-photon input");
        const CheckResult* ratio = coh.check(
            "ratio P(absorbed)/P(ionized) reaches |<vac|alpha>|^2");
        const CheckResult* mono =
            coh.check("convergence is monotone as coupling*t decreases");
        if (!eq || !ratio || !mono) {
            detail = "missing checks";
            return false;
        }
        detail = "fock gap " + std::to_string(eq->actual) + ", final drift " +
                 std::to_string(mono->actual);
        return eq->pass && ratio->pass && mono->pass;
    });

    criterion("9. Robertson equality case and the classical gate boundary", 1.0,
              [](std::string& detail) {
        SystemModel m = zero_model(2);
        Ensemble ens{DensityOperator{spin_proj({0, 0, 1}, +1)}, "up_z"};
        double bound =
            robertson_bound(ens, m, pauli('x') / 2.0, pauli('y') / 2.0);
        double vx = variance(ens, m, pauli('x') / 2.0);
        double vy = variance(ens, m, pauli('y') / 2.0);
        bool equality = std::abs(vx * vy - 1.0 / 16.0) < 1e-12 &&
                        std::abs(bound * bound - 1.0 / 16.0) < 1e-12;

        Quantity fine_x = build_quantity(m, "S_x", pauli('x') / 2.0,
                                         Grid::uniform(0.5, -1, 1));
        Quantity fine_y = build_quantity(m, "S_y", pauli('y') / 2.0,
                                         Grid::uniform(0.5, -1, 1));
        bool boundary_false = !classical_ok(fine_x, fine_y, ens, m, 0.0, 10.0);

        double coarse = std::sqrt(10.0 * bound);  // product exactly 10x bound
        Quantity coarse_x = build_quantity(m, "S_x", pauli('x') / 2.0,
                                           Grid::uniform(coarse, -1, 1));
        Quantity coarse_y = build_quantity(m, "S_y", pauli('y') / 2.0,
                                           Grid::uniform(coarse, -1, 1));
        bool coarse_true = classical_ok(coarse_x, coarse_y, ens, m, 0.0, 10.0);

        detail = "Var product " + std::to_string(vx * vy) + ", bound^2 " +
                 std::to_string(bound * bound);
        return equality && boundary_false && coarse_true;
    });

    criterion("10. occupation-candidate overlap demo", 1.0,
              [](std::string& detail) {
        Ket psi(4);
        psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0, 0.0;
        std::vector<Ket> basis;
        for (int k = 0; k < 4; ++k) {
            Ket e = Ket::Zero(4);
            e(k) = 1.0;
            basis.push_back(e);
        }
        ScenarioReport contradiction = gleason_demo(psi, basis);
        bool exhibits = contradiction.all_passed() &&
                        contradiction.checks[0].actual < 1.0 - 1e-9;

        std::vector<Ket> same = {psi, std::exp(Complex(0, 0.7)) * psi};
        ScenarioReport consistent = gleason_demo(psi, same);
        detail = "mean overlap " +
                 std::to_string(contradiction.checks[0].actual) +
                 " vs consistent " + std::to_string(consistent.checks[0].actual);
        return exhibits && consistent.all_passed();
    });

    criterion("11. property suites over 500 randomized cases each", 120.0,
              [](std::string& detail) {
        SplitMix64 rng(11011);

        // Projector laws.
        for (int it = 0; it < 500; ++it) {
            int dim = 2 + static_cast<int>(rng.next_below(7));
            ComplexMatrix h0 = test::random_hermitian(rng, dim);
            SystemModel m = make_system({dim}, h0, h0);
            std::vector<int> idx;
            for (int k = 0; k < dim; ++k)
                if (rng.next_double() < 0.5) idx.push_back(k);
            if (idx.empty()) idx.push_back(0);
            ComplexMatrix z = projector(m, idx).matrix;
            if (frob(ComplexMatrix(z * z - z)) > 1e-10 ||
                frob(ComplexMatrix(z - z.adjoint())) > 1e-10) {
                detail = "projector law violated";
                return false;
            }
        }

        // One-hot sampling.
        {
            SystemModel m =
                make_system({2}, pauli('z'), pauli('z') + 0.8 * pauli('x'));
            Ensemble ens{DensityOperator{ComplexMatrix::Identity(2, 2) / 2.0},
                         "mixed"};
            HistorySpec spec =
                make_history(m, {0.5, 1.5}, {{{0}, {1}}, {{0}, {1}}});
            auto trials = sample_trials(ens, m, spec, 500, 11);
            for (const auto& t : trials)
                for (std::size_t i = 0; i < spec.times.size(); ++i)
                    if (t.x_value(i, 0) + t.x_value(i, 1) != 1) {
                        detail = "one-hot violated";
                        return false;
                    }
        }

        // Marginalization over a complete partition taken at the
        // preparation time of a diagonal ensemble.
        for (int it = 0; it < 500; ++it) {
            SystemModel m = make_system(
                {3}, ComplexMatrix::Zero(3, 3), test::random_hermitian(rng, 3));
            ComplexMatrix rho = ComplexMatrix::Zero(3, 3);
            double total_w = 0.0;
            for (int k = 0; k < 3; ++k) {
                double w = rng.next_double() + 1e-3;
                rho(k, k) = w;
                total_w += w;
            }
            rho /= total_w;
            Ensemble ens{DensityOperator{rho}, "diag"};
            Ket v = test::random_ket(rng, 3);
            Event a{"a", v * v.adjoint(), 1.0};
            double total = 0.0;
            for (int cell = 0; cell < 3; ++cell)
                total += joint(ens, m,
                               {a, Event{"b", projector(m, {cell}).matrix, 0.0}});
            if (std::abs(total - joint(ens, m, {a}).value) > 1e-9) {
                detail = "marginalization violated";
                return false;
            }
        }

        // Exclusivity additivity of disjoint same-time propositions.
        for (int it = 0; it < 500; ++it) {
            int dim = 4 + static_cast<int>(rng.next_below(4));
            ComplexMatrix h0 = test::random_hermitian(rng, dim);
            SystemModel m = make_system({dim}, h0, h0);
            std::vector<int> c1{0}, c2{1};  // disjoint by construction
            for (int k = 2; k < dim; ++k) {
                double u = rng.next_double();
                if (u < 0.33)
                    c1.push_back(k);
                else if (u < 0.66)
                    c2.push_back(k);
            }
            PropositionExpr both = PropositionExpr::make_or(
                PropositionExpr::make_atom({"A", c1, 0.0}),
                PropositionExpr::make_atom({"B", c2, 0.0}));
            ComplexMatrix x_or = characteristic(both, m).matrix;
            ComplexMatrix sum =
                characteristic(PropositionExpr::make_atom({"A", c1, 0.0}), m)
                    .matrix +
                characteristic(PropositionExpr::make_atom({"B", c2, 0.0}), m)
                    .matrix;
            if (frob(ComplexMatrix(x_or - sum)) > 1e-12) {
                detail = "exclusivity additivity violated";
                return false;
            }
        }

        // Unitary group law.
        for (int it = 0; it < 500; ++it) {
            int dim = 2 + static_cast<int>(rng.next_below(5));
            ComplexMatrix h = test::random_hermitian(rng, dim);
            double t1 = 4.0 * rng.next_double() - 2.0;
            double t2 = 4.0 * rng.next_double() - 2.0;
            ComplexMatrix u1 = unitary_evolution(h, t1);
            ComplexMatrix u2 = unitary_evolution(h, t2);
            ComplexMatrix u12 = unitary_evolution(h, t1 + t2);
            if (frob(ComplexMatrix(u1 * u2 - u12)) > 1e-10 ||
                frob(ComplexMatrix(u1 * u1.adjoint() -
                                   ComplexMatrix::Identity(dim, dim))) >
                    1e-10) {
                detail = "unitary group law violated";
                return false;
            }
        }
        return true;
    });

    std::printf("%s: %d criterion(s) failed\n",
                g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
