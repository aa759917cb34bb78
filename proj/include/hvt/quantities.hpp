#ifndef HVT_QUANTITIES_HPP
#define HVT_QUANTITIES_HPP

#include <optional>
#include <string>
#include <vector>

#include "hvt/probability.hpp"
#include "hvt/trials.hpp"

namespace hvt {

/// Discretization grid: anchors F_i with F_0 = 0, strictly increasing,
/// finite index window [i_min, i_max]. Cell i covers the half-open interval
/// [(F_{i-1}+F_i)/2, (F_i+F_{i+1})/2); the window edges extend by half the
/// adjacent interval. A single-anchor grid is one cell covering the line.
struct Grid {
    std::vector<double> anchors;
    int i_min = 0;  // anchors[k] is the value at index i_min + k

    static Grid from_anchors(std::vector<double> anchors);
    static Grid uniform(double delta, int i_min, int i_max);

    int size() const { return static_cast<int>(anchors.size()); }
    int i_max() const { return i_min + size() - 1; }
    double value(int i) const { return anchors[i - i_min]; }
    double min_interval() const;

    /// Grid index whose cell contains x; throws when x is out of range.
    int cell_of(double x) const;
};

/// One occupied cell of a quantity: grid value, the projector onto the
/// simultaneous eigenvectors falling in the cell, and those eigenvalues.
struct QuantityCell {
    int grid_index = 0;
    double value = 0.0;
    Event event;                     // projector, labeled "name=value"
    std::vector<double> eigenvalues; // exact F eigenvalues in the cell
};

struct Quantity {
    std::string name;
    ComplexMatrix op;
    Grid grid;
    std::vector<QuantityCell> cells;       // non-empty cells only
    std::vector<Event> constituent_atoms;  // elementary propositions involved
};

struct InstantValue {
    std::string quantity;
    long trial = 0;
    double value = 0.0;
    int cell = 0;  // grid index
};

/// One entry of a gated pairing table.
struct PairedCell {
    double value = 0.0;        // f_value op g_value
    double f_value = 0.0, g_value = 0.0;
    int f_cell = 0, g_cell = 0;
    double joint_prob = 0.0;
    std::vector<Event> atoms;  // conjunction defining this cell
};

struct PairedQuantity {
    std::string name;
    std::vector<PairedCell> cells;
    std::vector<Event> constituent_atoms;  // union of both operands' atoms
};

/// Refusal evidence when the compatibility gate blocks an operation.
struct GateRefusal {
    std::vector<std::string> failing_subset;  // labels of the failing subset
    std::pair<std::string, std::string> failing_pair;  // non-commuting pair
    double residual = 0.0;
    std::string message;
};

struct GateOutcome {
    std::optional<PairedQuantity> table;
    std::optional<GateRefusal> refusal;
    bool allowed() const { return table.has_value(); }
};

enum class ArithmeticOp { add, mul };

/// Builds a quantity from a Hermitian operator commuting with h0. The
/// simultaneous eigenbasis is obtained by diagonalizing the operator inside
/// each h0 eigenspace; ties break by eigenvalue, then original index order.
/// Eigenvalues outside the grid window are an error. Operators that do not
/// commute with h0 have no instantaneous value here at all; estimating such
/// quantities through auxiliary measurement instruments is out of scope.
Quantity build_quantity(const SystemModel& model, const std::string& name,
                        const ComplexMatrix& op, const Grid& grid);

/// Two-valued quantity defined by a single proposition: value_true on the
/// event, value_false on its complement. Only the defining event enters the
/// compatibility gate; the complement is its Boolean negation and carries
/// no atom of its own.
Quantity indicator_quantity(const SystemModel& model, const std::string& name,
                            const Event& event, double value_true,
                            double value_false);

/// The grid value of the cell occupied at time t in the given trial. The
/// trial must have been sampled against this quantity's cell partition at t.
InstantValue instantaneous_value(const Quantity& q, const TrialRecord& trial,
                                 const std::vector<double>& trial_times,
                                 double t);

/// Compatibility-gated arithmetic. The gate runs the permutation check over
/// the union of both operands' constituent elementary propositions (every
/// subset, not just pairs: pairwise checks provably pass in ensembles whose
/// reduced states are maximally mixed, where higher-order subsets still
/// fail). On refusal the report carries the failing subset and its
/// non-commuting pair.
GateOutcome gated_arithmetic(ArithmeticOp op, const Quantity& f,
                             const Quantity& g, const Ensemble& ens,
                             const SystemModel& model, double t);

/// Follow-up composition on an already-gated pairing (sums of products).
GateOutcome gated_arithmetic(ArithmeticOp op, const PairedQuantity& f,
                             const PairedQuantity& g, const Ensemble& ens,
                             const SystemModel& model, double t);

double variance(const Ensemble& ens, const SystemModel& model,
                const ComplexMatrix& op, double t = 0.0);

/// (1/2)|Tr([F,G] rho)|.
double robertson_bound(const Ensemble& ens, const SystemModel& model,
                       const ComplexMatrix& f, const ComplexMatrix& g,
                       double t = 0.0);

/// Classical-approximation gate: min interval product at least
/// `factor` times the Robertson bound.
bool classical_ok(const Quantity& f, const Quantity& g, const Ensemble& ens,
                  const SystemModel& model, double t = 0.0,
                  double factor = 10.0);

}  // namespace hvt

#endif
