#include "hvt/quantities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace hvt {

Grid Grid::from_anchors(std::vector<double> anchors) {
    if (anchors.empty()) throw Error("grid: no anchors");
    int zero_pos = -1;
    for (std::size_t k = 0; k < anchors.size(); ++k) {
        if (k > 0 && !(anchors[k] > anchors[k - 1]))
            throw Error("grid: anchors must be strictly increasing");
        if (anchors[k] == 0.0) zero_pos = static_cast<int>(k);
    }
    if (zero_pos < 0) throw Error("grid: anchors must include 0");
    Grid g;
    g.anchors = std::move(anchors);
    g.i_min = -zero_pos;
    return g;
}

Grid Grid::uniform(double delta, int i_min, int i_max) {
    if (!(delta > 0.0)) throw Error("grid: interval must be positive");
    if (i_min > 0 || i_max < 0 || i_min > i_max)
        throw Error("grid: index range must contain 0");
    Grid g;
    g.i_min = i_min;
    for (int i = i_min; i <= i_max; ++i) g.anchors.push_back(delta * i);
    return g;
}

double Grid::min_interval() const {
    if (anchors.size() < 2) return std::numeric_limits<double>::infinity();
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < anchors.size(); ++k)
        m = std::min(m, anchors[k] - anchors[k - 1]);
    return m;
}

int Grid::cell_of(double x) const {
    if (anchors.size() == 1) return i_min;  // one cell covering the line
    const double lo = anchors.front() - (anchors[1] - anchors[0]) / 2.0;
    const double hi = anchors.back() +
                      (anchors.back() - anchors[anchors.size() - 2]) / 2.0;
    if (x < lo || x >= hi)
        throw Error("grid: value " + std::to_string(x) +
                    " outside the covered range [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + ")");
    for (std::size_t k = 0; k + 1 < anchors.size(); ++k)
        if (x < (anchors[k] + anchors[k + 1]) / 2.0)
            return i_min + static_cast<int>(k);
    return i_max();
}

namespace {

std::string value_label(const std::string& name, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s=%.12g", name.c_str(), v);
    return buf;
}

std::vector<Event> union_atoms(const std::vector<Event>& a,
                               const std::vector<Event>& b) {
    std::vector<Event> out = a;
    for (const auto& e : b) {
        bool dup = false;
        for (const auto& f : out)
            if (frob(ComplexMatrix(e.z - f.z)) <= 1e-14 * std::max(1.0, frob(e.z))) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(e);
    }
    return out;
}

double apply_op(ArithmeticOp op, double a, double b) {
    return op == ArithmeticOp::add ? a + b : a * b;
}

// Runs the permutation gate on a combined atom family at time t.
std::optional<GateRefusal> run_gate(const std::vector<Event>& atoms,
                                    const Ensemble& ens,
                                    const SystemModel& model, double t) {
    if (atoms.size() < 2) return std::nullopt;
    CompatReport rep = compat_check(model, ens.rho0, atoms, t);
    if (rep.compatible) return std::nullopt;

    GateRefusal refusal;
    const SubsetReport* failing = rep.first_failing(model.tol.compat);
    if (failing) {
        for (int idx : failing->subset)
            refusal.failing_subset.push_back(atoms[idx].label);
        auto [pa, pb] = rep.noncommuting_pair(*failing, atoms);
        if (pa >= 0)
            refusal.failing_pair = {atoms[pa].label, atoms[pb].label};
        refusal.residual = failing->worst_residual;
    } else {
        refusal.residual = rep.worst_residual;
    }
    refusal.message = "compatibility gate refused: subset {";
    for (std::size_t i = 0; i < refusal.failing_subset.size(); ++i)
        refusal.message += (i ? ", " : "") + refusal.failing_subset[i];
    refusal.message += "} has permutation residual " +
                       std::to_string(refusal.residual) +
                       "; non-commuting pair ('" + refusal.failing_pair.first +
                       "', '" + refusal.failing_pair.second + "')";
    return refusal;
}

double conjunction_probability(const Ensemble& ens, const SystemModel& model,
                               std::vector<Event> atoms, double t) {
    for (auto& a : atoms) a.time = t;
    ChainOperator k = chain(model, atoms);
    double raw = (k.matrix * ens.rho0.matrix * k.matrix.adjoint()).trace().real();
    return std::clamp(raw, 0.0, 1.0);
}

}  // namespace

Quantity build_quantity(const SystemModel& model, const std::string& name,
                        const ComplexMatrix& op, const Grid& grid) {
    if (op.rows() != model.dim() || op.cols() != model.dim())
        throw Error("build_quantity: operator dimension mismatch");
    if (!is_hermitian(op, model.tol.herm))
        throw Error("build_quantity: operator is not Hermitian");
    ComplexMatrix comm = op * model.h0 - model.h0 * op;
    const double comm_scale = std::max(1.0, frob(op) * frob(model.h0));
    if (frob(comm) > model.tol.comm * comm_scale)
        throw Error("build_quantity: '" + name +
                    "' does not commute with h0 (commutator norm " +
                    std::to_string(frob(comm)) +
                    "); no instantaneous value definable");

    // Simultaneous eigenbasis: diagonalize the operator inside each h0
    // eigenspace. Ties break by operator eigenvalue, then original order.
    const Eigen::Index n = model.dim();
    const RealVector& energies = model.basis.eigenvalues;
    const ComplexMatrix& v = model.basis.eigenvectors;
    const double group_tol =
        1e-9 * std::max(1.0, std::abs(energies(n - 1)) + std::abs(energies(0)));

    ComplexMatrix w(n, n);
    std::vector<double> f_values(n);
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index stop = start + 1;
        while (stop < n && energies(stop) - energies(start) <= group_tol) ++stop;
        const Eigen::Index m = stop - start;
        ComplexMatrix vb = v.middleCols(start, m);
        if (m == 1) {
            w.col(start) = vb;
            f_values[start] = (vb.adjoint() * op * vb)(0, 0).real();
        } else {
            ComplexMatrix fb = vb.adjoint() * op * vb;
            StationaryBasis sub = hermitian_eig(fb, 1e-8);
            ComplexMatrix rotated = vb * sub.eigenvectors;
            for (Eigen::Index k = 0; k < m; ++k) {
                w.col(start + k) = rotated.col(k);
                f_values[start + k] = sub.eigenvalues(k);
            }
        }
        start = stop;
    }

    // Safety: the rotated basis must actually diagonalize the operator.
    ComplexMatrix recon = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        recon += f_values[k] * (w.col(k) * w.col(k).adjoint());
    if (frob(ComplexMatrix(recon - op)) > 1e-8 * std::max(1.0, frob(op)))
        throw Error("build_quantity: simultaneous diagonalization failed");

    Quantity q;
    q.name = name;
    q.op = op;
    q.grid = grid;

    std::map<int, std::vector<Eigen::Index>> members;
    for (Eigen::Index k = 0; k < n; ++k)
        members[grid.cell_of(f_values[k])].push_back(k);

    for (const auto& [cell_idx, ks] : members) {
        QuantityCell cell;
        cell.grid_index = cell_idx;
        cell.value = grid.value(cell_idx);
        ComplexMatrix p = ComplexMatrix::Zero(n, n);
        for (Eigen::Index k : ks) {
            p += w.col(k) * w.col(k).adjoint();
            cell.eigenvalues.push_back(f_values[k]);
        }
        cell.event = Event{value_label(name, cell.value), std::move(p), 0.0};
        q.cells.push_back(std::move(cell));
    }
    for (const auto& cell : q.cells) q.constituent_atoms.push_back(cell.event);
    return q;
}

Quantity indicator_quantity(const SystemModel& model, const std::string& name,
                            const Event& event, double value_true,
                            double value_false) {
    const Eigen::Index n = model.dim();
    if (event.z.rows() != n) throw Error("indicator_quantity: dimension mismatch");
    if (value_true == value_false)
        throw Error("indicator_quantity: values must differ");

    std::vector<double> anchors{0.0, value_true, value_false};
    std::sort(anchors.begin(), anchors.end());
    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

    Quantity q;
    q.name = name;
    q.grid = Grid::from_anchors(anchors);
    q.op = value_true * event.z +
           value_false * (ComplexMatrix::Identity(n, n) - event.z);

    ComplexMatrix comm = q.op * model.h0 - model.h0 * q.op;
    if (frob(comm) > model.tol.comm * std::max(1.0, frob(q.op) * frob(model.h0)))
        throw Error("indicator_quantity: '" + name +
                    "' does not commute with h0; no instantaneous value definable");

    QuantityCell on;
    on.value = value_true;
    on.grid_index = q.grid.cell_of(value_true);
    on.event = Event{name, event.z, event.time};
    QuantityCell off;
    off.value = value_false;
    off.grid_index = q.grid.cell_of(value_false);
    off.event = Event{"NOT " + name,
                      ComplexMatrix::Identity(n, n) - event.z, event.time};
    if (off.value < on.value) {
        q.cells = {std::move(off), std::move(on)};
    } else {
        q.cells = {std::move(on), std::move(off)};
    }
    q.constituent_atoms = {Event{name, event.z, event.time}};
    return q;
}

InstantValue instantaneous_value(const Quantity& q, const TrialRecord& trial,
                                 const std::vector<double>& trial_times,
                                 double t) {
    std::size_t idx = trial_times.size();
    for (std::size_t i = 0; i < trial_times.size(); ++i)
        if (std::abs(trial_times[i] - t) <= 1e-12) {
            idx = i;
            break;
        }
    if (idx == trial_times.size())
        throw Error("instantaneous_value: trial does not resolve time " +
                    std::to_string(t));
    int outcome = trial.outcomes.at(idx);
    if (outcome < 0 || outcome >= static_cast<int>(q.cells.size()))
        throw Error("instantaneous_value: outcome does not match the partition");
    const QuantityCell& cell = q.cells[outcome];
    return InstantValue{q.name, trial.j, cell.value, cell.grid_index};
}

GateOutcome gated_arithmetic(ArithmeticOp op, const Quantity& f,
                             const Quantity& g, const Ensemble& ens,
                             const SystemModel& model, double t) {
    std::vector<Event> family = union_atoms(f.constituent_atoms,
                                            g.constituent_atoms);
    if (auto refusal = run_gate(family, ens, model, t))
        return GateOutcome{std::nullopt, std::move(*refusal)};

    PairedQuantity table;
    table.name = f.name + (op == ArithmeticOp::add ? "+" : "*") + g.name;
    table.constituent_atoms = family;
    for (std::size_t i = 0; i < f.cells.size(); ++i)
        for (std::size_t k = 0; k < g.cells.size(); ++k) {
            PairedCell cell;
            cell.f_cell = static_cast<int>(i);
            cell.g_cell = static_cast<int>(k);
            cell.f_value = f.cells[i].value;
            cell.g_value = g.cells[k].value;
            cell.value = apply_op(op, cell.f_value, cell.g_value);
            cell.atoms = {f.cells[i].event, g.cells[k].event};
            cell.joint_prob = conjunction_probability(ens, model, cell.atoms, t);
            table.cells.push_back(std::move(cell));
        }
    return GateOutcome{std::move(table), std::nullopt};
}

GateOutcome gated_arithmetic(ArithmeticOp op, const PairedQuantity& f,
                             const PairedQuantity& g, const Ensemble& ens,
                             const SystemModel& model, double t) {
    std::vector<Event> family = union_atoms(f.constituent_atoms,
                                            g.constituent_atoms);
    if (auto refusal = run_gate(family, ens, model, t))
        return GateOutcome{std::nullopt, std::move(*refusal)};

    PairedQuantity table;
    table.name = "(" + f.name + ")" + (op == ArithmeticOp::add ? "+" : "*") +
                 "(" + g.name + ")";
    table.constituent_atoms = family;
    for (const auto& cf : f.cells)
        for (const auto& cg : g.cells) {
            PairedCell cell;
            cell.f_value = cf.value;
            cell.g_value = cg.value;
            cell.value = apply_op(op, cf.value, cg.value);
            cell.atoms = union_atoms(cf.atoms, cg.atoms);
            cell.joint_prob = conjunction_probability(ens, model, cell.atoms, t);
            table.cells.push_back(std::move(cell));
        }
    return GateOutcome{std::move(table), std::nullopt};
}

double variance(const Ensemble& ens, const SystemModel& model,
                const ComplexMatrix& op, double t) {
    DensityOperator rho = evolve_density(ens.rho0, model, t);
    double mean = (op * rho.matrix).trace().real();
    ComplexMatrix dev = op - mean * ComplexMatrix::Identity(op.rows(), op.cols());
    return (dev * dev * rho.matrix).trace().real();
}

double robertson_bound(const Ensemble& ens, const SystemModel& model,
                       const ComplexMatrix& f, const ComplexMatrix& g,
                       double t) {
    DensityOperator rho = evolve_density(ens.rho0, model, t);
    ComplexMatrix comm = f * g - g * f;
    return 0.5 * std::abs((comm * rho.matrix).trace());
}

bool classical_ok(const Quantity& f, const Quantity& g, const Ensemble& ens,
                  const SystemModel& model, double t, double factor) {
    double bound = robertson_bound(ens, model, f.op, g.op, t);
    return f.grid.min_interval() * g.grid.min_interval() >= factor * bound;
}

}  // namespace hvt
