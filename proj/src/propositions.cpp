#include "hvt/propositions.hpp"

#include <algorithm>
#include <set>

namespace hvt {

PropositionExpr PropositionExpr::make_atom(ElementaryProposition a) {
    PropositionExpr e;
    e.kind = Kind::Atom;
    e.atom = std::move(a);
    return e;
}

PropositionExpr PropositionExpr::make_not(PropositionExpr c) {
    PropositionExpr e;
    e.kind = Kind::Not;
    e.lhs = std::make_shared<PropositionExpr>(std::move(c));
    return e;
}

PropositionExpr PropositionExpr::make_and(PropositionExpr l, PropositionExpr r) {
    PropositionExpr e;
    e.kind = Kind::And;
    e.lhs = std::make_shared<PropositionExpr>(std::move(l));
    e.rhs = std::make_shared<PropositionExpr>(std::move(r));
    return e;
}

PropositionExpr PropositionExpr::make_or(PropositionExpr l, PropositionExpr r) {
    PropositionExpr e;
    e.kind = Kind::Or;
    e.lhs = std::make_shared<PropositionExpr>(std::move(l));
    e.rhs = std::make_shared<PropositionExpr>(std::move(r));
    return e;
}

void validate_indices(const SystemModel& model, const std::vector<int>& indices) {
    if (indices.empty()) throw Error("proposition index set is empty");
    std::set<int> seen;
    for (int k : indices) {
        if (k < 0 || k >= model.dim())
            throw Error("proposition index " + std::to_string(k) +
                        " out of range for dimension " +
                        std::to_string(model.dim()));
        if (!seen.insert(k).second)
            throw Error("duplicate proposition index " + std::to_string(k));
    }
}

PartialCharacteristic projector(const SystemModel& model,
                                const std::vector<int>& indices, double time) {
    validate_indices(model, indices);
    std::vector<int> sorted(indices.begin(), indices.end());
    std::sort(sorted.begin(), sorted.end());
    ComplexMatrix p = ComplexMatrix::Zero(model.dim(), model.dim());
    for (int k : sorted) {
        Ket v = model.basis.eigenvectors.col(k);
        p += v * v.adjoint();
    }
    return PartialCharacteristic{std::move(p), time};
}

Event make_event(const SystemModel& model, const ElementaryProposition& p) {
    return Event{p.label, projector(model, p.indices, p.time).matrix, p.time};
}

Event make_event(std::string label, const Ket& state, double time) {
    double n = state.norm();
    if (!(n > 0.0)) throw Error("make_event: zero state vector");
    Ket v = state / n;
    return Event{std::move(label), v * v.adjoint(), time};
}

Event make_event(std::string label, ComplexMatrix proj, double time) {
    return Event{std::move(label), std::move(proj), time};
}

PartialCharacteristic heisenberg(const PartialCharacteristic& z,
                                 const SystemModel& model, double t) {
    if (z.matrix.rows() != model.dim())
        throw Error("heisenberg: dimension mismatch");
    if (t == 0.0) return PartialCharacteristic{z.matrix, t};
    ComplexMatrix u = unitary_evolution(model.h, t, model.tol.herm);
    return PartialCharacteristic{u.adjoint() * z.matrix * u, t};
}

namespace {

bool same_atom(const ElementaryProposition& a, const ElementaryProposition& b) {
    return a.time == b.time && a.indices == b.indices;
}

// Inclusion-exclusion normal form: every Boolean expression over atoms
// becomes a signed sum of pure conjunctions. NOT and OR are linear in the
// characteristic operators, so this expansion is exact.
std::vector<ExpandedTerm> expand(const PropositionExpr& e) {
    switch (e.kind) {
        case PropositionExpr::Kind::Atom:
            return {ExpandedTerm{1.0, {e.atom}}};
        case PropositionExpr::Kind::Not: {
            std::vector<ExpandedTerm> out{ExpandedTerm{1.0, {}}};
            for (ExpandedTerm t : expand(*e.lhs)) {
                t.coef = -t.coef;
                out.push_back(std::move(t));
            }
            return out;
        }
        case PropositionExpr::Kind::And: {
            std::vector<ExpandedTerm> out;
            auto ls = expand(*e.lhs);
            auto rs = expand(*e.rhs);
            for (const ExpandedTerm& l : ls)
                for (const ExpandedTerm& r : rs) {
                    ExpandedTerm t;
                    t.coef = l.coef * r.coef;
                    t.atoms = l.atoms;
                    for (const auto& a : r.atoms) {
                        bool dup = false;
                        for (const auto& b : t.atoms)
                            if (same_atom(a, b)) { dup = true; break; }
                        if (!dup) t.atoms.push_back(a);  // A AND A = A
                    }
                    out.push_back(std::move(t));
                }
            return out;
        }
        case PropositionExpr::Kind::Or: {
            auto out = expand(*e.lhs);
            for (ExpandedTerm& t : expand(*e.rhs)) out.push_back(std::move(t));
            PropositionExpr both = PropositionExpr::make_and(*e.lhs, *e.rhs);
            for (ExpandedTerm t : expand(both)) {
                t.coef = -t.coef;
                out.push_back(std::move(t));
            }
            return out;
        }
    }
    throw Error("characteristic: malformed expression node");
}

ComplexMatrix conjunction_characteristic(std::vector<ElementaryProposition> atoms,
                                         const SystemModel& model) {
    const Eigen::Index n = model.dim();
    if (atoms.empty()) return ComplexMatrix::Identity(n, n);

    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const auto& a, const auto& b) { return a.time < b.time; });
    std::vector<ComplexMatrix> zs;
    zs.reserve(atoms.size());
    for (const auto& a : atoms) {
        PartialCharacteristic z = projector(model, a.indices, a.time);
        zs.push_back(heisenberg(z, model, a.time).matrix);
    }
    if (atoms.size() == 2 && atoms[0].time == atoms[1].time) {
        // Symmetrized equal-time conjunction.
        const ComplexMatrix& za = zs[0];
        const ComplexMatrix& zb = zs[1];
        return (zb.adjoint() * za.adjoint() * za * zb +
                za.adjoint() * zb.adjoint() * zb * za) / 2.0;
    }
    // Chain: ascending time acts on the state first, so the earliest z is
    // rightmost and the latest leftmost.
    ComplexMatrix z = zs[0];
    for (std::size_t i = 1; i < zs.size(); ++i) z = zs[i] * z;
    return z.adjoint() * z;
}

}  // namespace

std::vector<ExpandedTerm> expand_expression(const PropositionExpr& expr) {
    return expand(expr);
}

Characteristic characteristic(const PropositionExpr& expr,
                              const SystemModel& model) {
    const Eigen::Index n = model.dim();
    ComplexMatrix x = ComplexMatrix::Zero(n, n);
    for (const ExpandedTerm& t : expand_expression(expr))
        x += t.coef * conjunction_characteristic(t.atoms, model);
    return Characteristic{std::move(x)};
}

bool exclusivity_check(const ElementaryProposition& a,
                       const ElementaryProposition& b,
                       const SystemModel& model) {
    if (a.time != b.time)
        throw Error("exclusivity_check: propositions have different times");
    validate_indices(model, a.indices);
    validate_indices(model, b.indices);
    std::set<int> sa(a.indices.begin(), a.indices.end());
    for (int k : b.indices)
        if (sa.count(k)) return false;
    return true;
}

}  // namespace hvt
