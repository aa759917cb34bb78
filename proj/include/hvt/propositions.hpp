#ifndef HVT_PROPOSITIONS_HPP
#define HVT_PROPOSITIONS_HPP

#include <memory>
#include <string>
#include <vector>

#include "hvt/qcore.hpp"

namespace hvt {

/// Occupation proposition: "the occupied stationary state at `time` lies in
/// the span of the frozen-basis vectors listed in `indices`".
struct ElementaryProposition {
    std::string label;
    std::vector<int> indices;  // sorted, unique, < model dim
    double time = 0.0;
};

/// Projector z of a proposition, tagged with its Heisenberg time.
struct PartialCharacteristic {
    ComplexMatrix matrix;
    double time = 0.0;
};

/// x = z^dagger z. Hermitian, PSD, spectrum within [0, 1] up to tolerance.
struct Characteristic {
    ComplexMatrix matrix;
};

/// A proposition bound to a concrete projector: the common currency of the
/// compatibility, probability and trials layers. Built either from an
/// ElementaryProposition (frozen-basis index set) or directly from a ket or
/// projector (scenario builders working in a rotated degenerate basis).
struct Event {
    std::string label;
    ComplexMatrix z;  // Schroedinger-picture projector
    double time = 0.0;
};

struct PropositionExpr {
    enum class Kind { Atom, Not, And, Or };
    Kind kind = Kind::Atom;
    ElementaryProposition atom;  // valid when kind == Atom
    std::shared_ptr<PropositionExpr> lhs, rhs;  // Not uses lhs only

    static PropositionExpr make_atom(ElementaryProposition a);
    static PropositionExpr make_not(PropositionExpr e);
    static PropositionExpr make_and(PropositionExpr l, PropositionExpr r);
    static PropositionExpr make_or(PropositionExpr l, PropositionExpr r);
};

void validate_indices(const SystemModel& model, const std::vector<int>& indices);

/// P = sum_{k in indices} v_k v_k^dagger in the frozen stationary basis.
PartialCharacteristic projector(const SystemModel& model,
                                const std::vector<int>& indices,
                                double time = 0.0);

Event make_event(const SystemModel& model, const ElementaryProposition& p);
Event make_event(std::string label, const Ket& state, double time);
Event make_event(std::string label, ComplexMatrix projector, double time);

/// Heisenberg picture: U^dagger(t) z U(t) under the model's total
/// Hamiltonian. The returned operator keeps the projector laws.
PartialCharacteristic heisenberg(const PartialCharacteristic& z,
                                 const SystemModel& model, double t);

/// One conjunction of the inclusion-exclusion expansion of an expression.
struct ExpandedTerm {
    double coef = 1.0;
    std::vector<ElementaryProposition> atoms;  // empty means the constant 1
};

/// Rewrites a Boolean expression as a signed sum of pure conjunctions
/// (NOT and OR are linear in the characteristic operators).
std::vector<ExpandedTerm> expand_expression(const PropositionExpr& expr);

/// Characteristic operator of a Boolean expression over occupation atoms.
/// NOT and OR are linear; AND of two operands at distinct times is the
/// time/normal-ordered product, and at coincident times the symmetrized
/// average of both orderings. Conjunctions of three or more atoms use the
/// chain ordering (ascending time acts first; input order breaks ties).
Characteristic characteristic(const PropositionExpr& expr,
                              const SystemModel& model);

/// True iff the index sets are disjoint (conjunction identically zero).
/// Requires equal time tags.
bool exclusivity_check(const ElementaryProposition& a,
                       const ElementaryProposition& b,
                       const SystemModel& model);

}  // namespace hvt

#endif
