#include "hvt/probability.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <numeric>

namespace hvt {

namespace {

std::vector<Event> sorted_by_time(std::vector<Event> atoms) {
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    return atoms;
}

// Groups of coincident times in an already-sorted atom list.
std::vector<std::pair<std::size_t, std::size_t>> time_groups(
    const std::vector<Event>& atoms) {
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    std::size_t i = 0;
    while (i < atoms.size()) {
        std::size_t j = i + 1;
        while (j < atoms.size() && atoms[j].time == atoms[i].time) ++j;
        groups.emplace_back(i, j);
        i = j;
    }
    return groups;
}

double chain_probability(const SystemModel& model, const DensityOperator& rho0,
                         const std::vector<Event>& atoms_sorted) {
    ChainOperator k = chain(model, atoms_sorted);
    return (k.matrix * rho0.matrix * k.matrix.adjoint()).trace().real();
}

Probability finish(double raw, double spread) {
    Probability p;
    p.raw = raw;
    p.spread = spread;
    p.value = std::clamp(raw, 0.0, 1.0);
    p.clamp_residual = std::abs(p.value - raw);
    return p;
}

}  // namespace

Probability joint(const Ensemble& ens, const SystemModel& model,
                  const std::vector<Event>& atoms, Mode mode) {
    if (atoms.empty()) throw Error("joint: empty proposition list");
    if (ens.rho0.dim() != model.dim())
        throw Error("joint: ensemble dimension mismatch");
    for (const auto& a : atoms)
        if (a.z.rows() != model.dim())
            throw Error("joint: projector dimension mismatch for '" + a.label + "'");

    std::vector<Event> sorted = sorted_by_time(atoms);
    auto groups = time_groups(sorted);

    if (mode == Mode::strict) {
        for (const auto& [lo, hi] : groups) {
            if (hi - lo < 2) continue;
            std::vector<Event> group(sorted.begin() + lo, sorted.begin() + hi);
            CompatReport rep = compat_check(model, ens.rho0, group, group[0].time);
            if (!rep.compatible) {
                std::string names;
                for (const auto& g : group) names += " '" + g.label + "'";
                throw Error("joint: coincident propositions" + names +
                            " fail the compatibility check (worst residual " +
                            std::to_string(rep.worst_residual) + ")");
            }
        }
        return finish(chain_probability(model, ens.rho0, sorted), 0.0);
    }

    // Permissive: evaluate the orderings of each coincident group and
    // report the spread. Grows factorially, so cap the search.
    std::size_t combos = 1;
    for (const auto& [lo, hi] : groups) {
        std::size_t f = 1;
        for (std::size_t m = 2; m <= hi - lo; ++m) f *= m;
        combos *= f;
        if (combos > 720) break;
    }

    double canonical = chain_probability(model, ens.rho0, sorted);
    double lo_v = canonical, hi_v = canonical;
    if (combos <= 720) {
        std::vector<std::vector<Event>> group_perms_base;
        std::function<void(std::size_t, std::vector<Event>&)> rec =
            [&](std::size_t gi, std::vector<Event>& acc) {
                if (gi == groups.size()) {
                    double v = chain_probability(model, ens.rho0, acc);
                    lo_v = std::min(lo_v, v);
                    hi_v = std::max(hi_v, v);
                    return;
                }
                auto [lo, hi] = groups[gi];
                std::vector<int> idx(hi - lo);
                std::iota(idx.begin(), idx.end(), 0);
                std::sort(idx.begin(), idx.end());
                do {
                    for (std::size_t i = 0; i < idx.size(); ++i)
                        acc[lo + i] = sorted[lo + idx[i]];
                    rec(gi + 1, acc);
                } while (std::next_permutation(idx.begin(), idx.end()));
                for (std::size_t i = lo; i < hi; ++i) acc[i] = sorted[i];
            };
        std::vector<Event> acc = sorted;
        rec(0, acc);
    } else {
        // Canonical and fully reversed coincident groups only.
        std::vector<Event> rev = sorted;
        for (const auto& [lo, hi] : groups)
            std::reverse(rev.begin() + lo, rev.begin() + hi);
        double v = chain_probability(model, ens.rho0, rev);
        lo_v = std::min(lo_v, v);
        hi_v = std::max(hi_v, v);
    }
    return finish(canonical, hi_v - lo_v);
}

Probability conditional(const Ensemble& ens, const SystemModel& model,
                        const std::vector<Event>& a,
                        const std::vector<Event>& given, Mode mode) {
    Probability pg = joint(ens, model, given, mode);
    if (pg.value <= model.tol.div)
        throw Error("conditional: conditioning probability is zero");
    std::vector<Event> both = a;
    both.insert(both.end(), given.begin(), given.end());
    Probability pab = joint(ens, model, both, mode);
    Probability out;
    out.raw = pab.raw / pg.raw;
    out.value = std::clamp(out.raw, 0.0, 1.0);
    out.clamp_residual = std::abs(out.value - out.raw);
    out.spread = pab.spread;
    return out;
}

Ensemble condition_ensemble(const Ensemble& ens, const SystemModel& model,
                            const std::vector<Event>& given, Mode mode) {
    if (given.empty()) throw Error("condition_ensemble: empty condition");
    if (mode == Mode::strict) {
        // Reuse the coincident-time gate.
        (void)joint(ens, model, given, mode);
    }
    ChainOperator k = chain(model, given);
    ComplexMatrix num = k.matrix * ens.rho0.matrix * k.matrix.adjoint();
    double tr = num.trace().real();
    if (tr <= model.tol.div)
        throw Error("condition_ensemble: conditioning probability is zero");
    std::string label = ens.label.empty() ? "" : ens.label + " & ";
    for (std::size_t i = 0; i < given.size(); ++i)
        label += (i ? " & " : "") + given[i].label;
    return Ensemble{DensityOperator{num / tr}, label};
}

DeterministicEvidence is_deterministic(const Ensemble& ens,
                                       const SystemModel& model,
                                       const std::vector<Event>& a,
                                       const std::vector<Event>& b, Mode mode) {
    DeterministicEvidence ev;
    ev.marginal_a = joint(ens, model, a, mode);
    ev.marginal_b = joint(ens, model, b, mode);
    if (ev.marginal_a <= model.tol.div || ev.marginal_b <= model.tol.div)
        throw Error("is_deterministic: a marginal vanishes, relation undefined");
    std::vector<Event> both = a;
    both.insert(both.end(), b.begin(), b.end());
    ev.joint = joint(ens, model, both, mode);
    ev.deterministic =
        std::abs(ev.joint / ev.marginal_a - 1.0) < model.tol.det &&
        std::abs(ev.joint / ev.marginal_b - 1.0) < model.tol.det;
    return ev;
}

bool is_exclusive(const Ensemble& ens, const SystemModel& model,
                  const std::vector<Event>& a, const std::vector<Event>& b,
                  Mode mode) {
    std::vector<Event> both = a;
    both.insert(both.end(), b.begin(), b.end());
    return joint(ens, model, both, mode).value < model.tol.det;
}

bool is_independent(const Ensemble& ens, const SystemModel& model,
                    const std::vector<Event>& a, const std::vector<Event>& b,
                    Mode mode) {
    double pa = joint(ens, model, a, mode);
    double pb = joint(ens, model, b, mode);
    std::vector<Event> both = a;
    both.insert(both.end(), b.begin(), b.end());
    double pab = joint(ens, model, both, mode);
    return std::abs(pab - pa * pb) < model.tol.det;
}

double apply_misdetection(double p, const MisdetectionModel& m) {
    if (p < 0.0 || p > 1.0)
        throw Error("apply_misdetection: probability out of [0,1]");
    if (m.p_tn < 0.0 || m.p_tn > 1.0 || m.p_fp < 0.0 || m.p_fp > 1.0)
        throw Error("apply_misdetection: error rates out of [0,1]");
    return std::clamp((1.0 - m.p_tn) * p + m.p_fp * (1.0 - p), 0.0, 1.0);
}

PairTable pair_table(const Ensemble& ens, const SystemModel& model,
                     const Event& a, const Event& b, Mode mode) {
    double pa = joint(ens, model, {a}, mode);
    double pb = joint(ens, model, {b}, mode);
    double pab = joint(ens, model, {a, b}, mode);
    // Negations follow from the linear conversion rules.
    double p_nab = std::clamp(pb - pab, 0.0, 1.0);
    double p_anb = std::clamp(pa - pab, 0.0, 1.0);
    double p_nanb = std::clamp(1.0 - pa - pb + pab, 0.0, 1.0);

    auto cond = [&](double j, double marg_b) {
        return marg_b > model.tol.div ? j / marg_b : 0.0;
    };
    PairTable table;
    table.rows = {
        {a.label, b.label, pab, pa, pb, cond(pab, pb)},
        {a.label, "NOT " + b.label, p_anb, pa, 1.0 - pb, cond(p_anb, 1.0 - pb)},
        {"NOT " + a.label, b.label, p_nab, 1.0 - pa, pb, cond(p_nab, pb)},
        {"NOT " + a.label, "NOT " + b.label, p_nanb, 1.0 - pa, 1.0 - pb,
         cond(p_nanb, 1.0 - pb)},
    };
    return table;
}

std::string PairTable::to_csv() const {
    std::string out =
        "outcome_a,outcome_b,joint,marginal_a,marginal_b,conditional_a_given_b\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g,%.17g\n",
                      r.outcome_a.c_str(), r.outcome_b.c_str(), r.joint,
                      r.marginal_a, r.marginal_b, r.conditional_a_given_b);
        out += buf;
    }
    return out;
}

}  // namespace hvt
