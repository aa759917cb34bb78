#ifndef HVT_SCENARIOS_HPP
#define HVT_SCENARIOS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hvt/quantities.hpp"

namespace hvt {

struct CheckResult {
    std::string description;
    double expected = 0.0;
    double actual = 0.0;
    bool pass = false;
    std::string note;  // how the expected value was obtained
};

struct ReportTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::string> row_labels;
    std::vector<std::vector<double>> rows;
    std::string to_csv() const;
};

struct ScenarioReport {
    std::string name;
    std::vector<ReportTable> tables;
    std::vector<CheckResult> checks;

    bool all_passed() const;
    std::string to_json() const;
    const ReportTable* table(const std::string& name) const;
    const CheckResult* check(const std::string& description) const;
};

/// Spin-1/2 with vanishing Hamiltonian: which proposition families pass the
/// permutation check, per-direction spin value maps, the refusal of
/// simultaneous x/y spin values, and the classical gate that re-admits them
/// at coarse enough grids (classical_factor scales the required margin).
ScenarioReport spin_degenerate(double classical_factor = 10.0);

/// Two spins in the singlet state: joint law (1 - u1.u2)/4, correlators,
/// the CHSH combination 2*sqrt(2), sampled same-direction deterministic
/// relations, and the gate refusal of the four-term per-trial sum.
ScenarioReport singlet_chsh(std::uint64_t seed = 12345,
                            std::size_t n_trials = 10000);

/// Schmidt pair sum_chi c_chi |chi>|chi>: joint/marginal tables and
/// deterministic index correlations.
ScenarioReport entangled_pair(const std::vector<Complex>& c);

/// Two-level emitter coupled to a uniform comb of n_modes bath modes:
/// survival curve, fitted decay rate against the golden-rule value
/// 2 pi g^2 / (mode spacing), revival-window flagging.
ScenarioReport decay_toy(int n_modes, double coupling, double detuning_span,
                         double window = 0.0);

/// Emitter decay driving a detector and a cat: deterministic chain
/// dead = output = ionized, exponential survival, exclusivity on sampled
/// trials, misdetection composition.
ScenarioReport cat_chain(double gamma, double p_tn, double p_fp,
                         std::vector<double> times = {},
                         std::uint64_t seed = 2024,
                         std::size_t n_trials = 2000);

/// Mean overlap of a state with candidate occupied states: equals 1 only
/// when every candidate matches up to phase, exhibiting the contradiction
/// in representing per-trial occupation by the ensemble state.
ScenarioReport gleason_demo(const Ket& psi, const std::vector<Ket>& candidates,
                            const std::vector<double>& weights = {});

struct FieldMode {
    bool fock1 = true;
    double alpha = 0.0;
    static FieldMode fock() { return FieldMode{true, 0.0}; }
    static FieldMode coherent(double a) { return FieldMode{false, a}; }
};

/// Two-level atom exchanging one excitation with a truncated mode:
/// "absorbed" (field proposition chain) versus "ionized" (atom proposition
/// chain). Fock |1> input makes the two probabilities equal; a coherent
/// input makes their ratio approach |<vac|alpha>|^2 at short times.
ScenarioReport light_quantum(FieldMode mode, double coupling, double t_max);

}  // namespace hvt

#endif
