#include "hvt/compatibility.hpp"

#include <algorithm>
#include <numeric>

#include "hvt/rng.hpp"

namespace hvt {

namespace {

// Histories with probability below this are numerically zero; differences
// between them are rounding noise, not order dependence. A smaller floor
// would flag mutually orthogonal chains (traces ~1e-33 of noise) as
// incompatible under any non-exact eigenbasis.
constexpr double kResidualFloor = 1e-12;
constexpr int kExhaustiveLimit = 6;    // largest subset enumerated in full
constexpr int kFamilyLimit = 12;       // largest proposition family accepted
constexpr int kSampledPermutations = 1000;
constexpr std::uint64_t kPermSeed = 0x5157c0de5157c0deull;

ComplexMatrix ordered_product(const std::vector<const ComplexMatrix*>& zs,
                              const std::vector<int>& order) {
    ComplexMatrix k = *zs[order[0]];
    for (std::size_t i = 1; i < order.size(); ++i) k *= *zs[order[i]];
    return k;
}

double chain_trace(const ComplexMatrix& k, const ComplexMatrix& rho) {
    return (k * rho * k.adjoint()).trace().real();
}

}  // namespace

const SubsetReport* CompatReport::first_failing(double tau) const {
    for (const auto& s : subsets)
        if (s.worst_residual >= tau) return &s;
    return nullptr;
}

std::pair<int, int> CompatReport::noncommuting_pair(
    const SubsetReport& s, const std::vector<Event>& atoms) const {
    for (std::size_t a = 0; a < s.subset.size(); ++a)
        for (std::size_t b = a + 1; b < s.subset.size(); ++b) {
            const ComplexMatrix& za = atoms[s.subset[a]].z;
            const ComplexMatrix& zb = atoms[s.subset[b]].z;
            double comm = frob(ComplexMatrix(za * zb - zb * za));
            if (comm > 1e-12 * std::max(1.0, frob(za) * frob(zb)))
                return {s.subset[a], s.subset[b]};
        }
    return {-1, -1};
}

ChainOperator chain(const SystemModel& model, const std::vector<Event>& atoms) {
    if (atoms.empty()) throw Error("chain: empty atom list");
    for (const auto& a : atoms)
        if (a.z.rows() != model.dim() || a.z.cols() != model.dim())
            throw Error("chain: projector dimension mismatch");

    std::vector<int> order(atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return atoms[a].time < atoms[b].time;
    });

    ChainOperator out;
    ComplexMatrix k = ComplexMatrix::Identity(model.dim(), model.dim());
    for (int idx : order) {
        const Event& a = atoms[idx];
        PartialCharacteristic z = heisenberg(
            PartialCharacteristic{a.z, a.time}, model, a.time);
        k = z.matrix * k;  // later times multiply from the left
        out.factors.insert(out.factors.begin(), {z, a.time});
    }
    out.matrix = std::move(k);
    return out;
}

CompatReport compat_check(const SystemModel& model, const DensityOperator& rho0,
                          const std::vector<Event>& atoms, double t) {
    const int n = static_cast<int>(atoms.size());
    if (n < 2) throw Error("compat_check: need at least two propositions");
    if (n > kFamilyLimit)
        throw Error("compat_check: subset budget exceeded for " +
                    std::to_string(n) + " propositions (limit " +
                    std::to_string(kFamilyLimit) + ")");
    if (rho0.dim() != model.dim())
        throw Error("compat_check: ensemble dimension mismatch");
    for (const auto& a : atoms)
        if (a.z.rows() != model.dim())
            throw Error("compat_check: projector dimension mismatch");

    DensityOperator rho_t = evolve_density(rho0, model, t);

    std::vector<const ComplexMatrix*> zs;
    zs.reserve(atoms.size());
    for (const auto& a : atoms) zs.push_back(&a.z);

    CompatReport report;
    for (const auto& a : atoms) report.labels.push_back(a.label);

    // Subsets in lexicographic order by index mask, sizes 2..n.
    std::vector<int> subset;
    std::vector<std::vector<int>> all_subsets;
    for (int size = 2; size <= n; ++size) {
        subset.assign(size, 0);
        std::iota(subset.begin(), subset.end(), 0);
        while (true) {
            all_subsets.push_back(subset);
            int i = size - 1;
            while (i >= 0 && subset[i] == n - size + i) --i;
            if (i < 0) break;
            ++subset[i];
            for (int j = i + 1; j < size; ++j) subset[j] = subset[j - 1] + 1;
        }
    }

    for (const auto& s : all_subsets) {
        SubsetReport sr;
        sr.order = static_cast<int>(s.size());
        sr.subset = s;

        std::vector<int> positions(s.size());
        std::iota(positions.begin(), positions.end(), 0);

        std::vector<const ComplexMatrix*> sub_zs;
        for (int idx : s) sub_zs.push_back(zs[idx]);

        const double t_id =
            chain_trace(ordered_product(sub_zs, positions), rho_t.matrix);

        auto record = [&](const std::vector<int>& perm) {
            PermutationResidual pr;
            pr.perm = perm;
            pr.trace = chain_trace(ordered_product(sub_zs, perm), rho_t.matrix);
            pr.delta = pr.trace - t_id;
            pr.residual = std::abs(pr.delta) / std::max(t_id, kResidualFloor);
            sr.worst_residual = std::max(sr.worst_residual, pr.residual);
            sr.per_permutation.push_back(std::move(pr));
        };

        if (sr.order <= kExhaustiveLimit) {
            std::vector<int> perm = positions;
            do {
                record(perm);
            } while (std::next_permutation(perm.begin(), perm.end()));
        } else {
            report.sampled = true;
            record(positions);
            std::uint64_t h = kPermSeed;
            for (int idx : s) h = SplitMix64::mix64(h ^ (idx + 1));
            SplitMix64 rng(h);
            for (int it = 0; it < kSampledPermutations; ++it) {
                std::vector<int> perm = positions;
                for (int i = static_cast<int>(perm.size()) - 1; i > 0; --i)
                    std::swap(perm[i], perm[rng.next_below(i + 1)]);
                record(perm);
            }
        }

        if (report.subsets.empty() || sr.worst_residual > report.worst_residual) {
            report.worst_residual = sr.worst_residual;
            report.worst_order = sr.order;
            report.worst_subset = sr.subset;
        }
        report.subsets.push_back(std::move(sr));
    }

    report.compatible = report.worst_residual < model.tol.compat;
    return report;
}

Classification classify(const SystemModel& model, const DensityOperator& rho0,
                        const std::vector<Event>& atoms, double t) {
    CompatReport report = compat_check(model, rho0, atoms, t);
    if (!report.compatible)
        throw Error("classify: proposition set is not compatible (residual " +
                    std::to_string(report.worst_residual) + ")");

    std::vector<const ComplexMatrix*> zs;
    for (const auto& a : atoms) zs.push_back(&a.z);

    for (const auto& sr : report.subsets) {
        std::vector<const ComplexMatrix*> sub_zs;
        for (int idx : sr.subset) sub_zs.push_back(zs[idx]);
        std::vector<int> identity(sr.subset.size());
        std::iota(identity.begin(), identity.end(), 0);
        ComplexMatrix k = ordered_product(sub_zs, identity);
        ComplexMatrix kk = k.adjoint() * k;
        const double scale = std::max(1.0, frob(kk));
        for (const auto& pr : sr.per_permutation) {
            ComplexMatrix p = ordered_product(sub_zs, pr.perm);
            if (frob(ComplexMatrix(p.adjoint() * p - kk)) > model.tol.op * scale)
                return Classification::type_ii;
        }
    }
    return Classification::type_i;
}

ConsistencyReport consistency_check(const SystemModel& model,
                                    const DensityOperator& rho0,
                                    const HistoryFamily& family) {
    if (family.times.empty() || family.times.size() != family.partitions.size())
        throw Error("consistency_check: times/partitions size mismatch");
    for (std::size_t i = 1; i < family.times.size(); ++i)
        if (!(family.times[i] > family.times[i - 1]))
            throw Error("consistency_check: times must be strictly increasing");

    const Eigen::Index n = model.dim();
    std::size_t n_hist = 1;
    for (std::size_t i = 0; i < family.partitions.size(); ++i) {
        const auto& cells = family.partitions[i];
        if (cells.empty()) throw Error("consistency_check: empty partition");
        ComplexMatrix sum = ComplexMatrix::Zero(n, n);
        for (std::size_t a = 0; a < cells.size(); ++a) {
            sum += cells[a].z;
            for (std::size_t b = a + 1; b < cells.size(); ++b)
                if (frob(ComplexMatrix(cells[a].z * cells[b].z)) > 1e-10)
                    throw Error("consistency_check: partition cells overlap");
        }
        if (frob(ComplexMatrix(sum - ComplexMatrix::Identity(n, n))) > 1e-9)
            throw Error("consistency_check: partition is not exhaustive");
        n_hist *= cells.size();
        if (n_hist > 4096)
            throw Error("consistency_check: too many histories");
    }

    // Heisenberg projectors per (time, cell).
    std::vector<std::vector<ComplexMatrix>> zh(family.times.size());
    for (std::size_t i = 0; i < family.times.size(); ++i) {
        ComplexMatrix u = unitary_evolution(model.h, family.times[i],
                                            model.tol.herm);
        for (const auto& cell : family.partitions[i])
            zh[i].push_back(u.adjoint() * cell.z * u);
    }

    auto decode = [&](std::size_t h) {
        std::vector<int> cells(family.times.size());
        for (int i = static_cast<int>(family.times.size()) - 1; i >= 0; --i) {
            cells[i] = static_cast<int>(h % family.partitions[i].size());
            h /= family.partitions[i].size();
        }
        return cells;
    };
    auto chain_of = [&](const std::vector<int>& cells) {
        ComplexMatrix k = zh[0][cells[0]];
        for (std::size_t i = 1; i < cells.size(); ++i) k = zh[i][cells[i]] * k;
        return k;
    };

    ConsistencyReport report;
    for (std::size_t a = 0; a < n_hist; ++a) {
        std::vector<int> ca = decode(a);
        ComplexMatrix ka = chain_of(ca);
        for (std::size_t b = a + 1; b < n_hist; ++b) {
            std::vector<int> cb = decode(b);
            ComplexMatrix kb = chain_of(cb);
            HistoryOverlap ov;
            ov.left = ca;
            ov.right = cb;
            ov.overlap = std::abs((ka * rho0.matrix * kb.adjoint()).trace());
            report.worst_overlap = std::max(report.worst_overlap, ov.overlap);
            report.overlaps.push_back(std::move(ov));
        }
    }
    report.consistent = report.worst_overlap < model.tol.compat;

    // Companion permutation check over all cells, taken at the final time.
    std::vector<Event> all_cells;
    for (const auto& part : family.partitions)
        for (const auto& cell : part) all_cells.push_back(cell);
    if (all_cells.size() >= 2 && all_cells.size() <= 12)
        report.compat = compat_check(model, rho0, all_cells, family.times.back());
    return report;
}

}  // namespace hvt
