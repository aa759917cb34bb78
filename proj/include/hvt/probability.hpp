#ifndef HVT_PROBABILITY_HPP
#define HVT_PROBABILITY_HPP

#include <optional>
#include <string>
#include <vector>

#include "hvt/compatibility.hpp"
#include "hvt/propositions.hpp"

namespace hvt {

struct Ensemble {
    DensityOperator rho0;
    std::string label;  // conditioning proposition description
};

/// Classical independent error bits: p_tn is the probability of a missed
/// true event, p_fp of a spurious one.
struct MisdetectionModel {
    double p_tn = 0.0;
    double p_fp = 0.0;
};

enum class Mode { strict, permissive };

struct Probability {
    double value = 0.0;      // clamped to [0, 1]
    double raw = 0.0;        // trace before clamping
    double clamp_residual = 0.0;
    double spread = 0.0;     // permissive mode: max-min over coincident orderings
    operator double() const { return value; }
};

/// Joint probability Tr[K rho0 K^dagger] of time-tagged atoms. Coincident
/// time groups must pass compat_check in strict mode; permissive mode
/// instead evaluates the orderings of each coincident group and reports the
/// spread.
Probability joint(const Ensemble& ens, const SystemModel& model,
                  const std::vector<Event>& atoms, Mode mode = Mode::strict);

/// Pr(a AND given) / Pr(given). Requires Pr(given) > tol.div.
Probability conditional(const Ensemble& ens, const SystemModel& model,
                        const std::vector<Event>& a,
                        const std::vector<Event>& given,
                        Mode mode = Mode::strict);

/// Ensemble update: rho -> z rho z^dagger / Tr[...] with the Heisenberg
/// projector chain of `given`. Idempotent for elementary propositions.
Ensemble condition_ensemble(const Ensemble& ens, const SystemModel& model,
                            const std::vector<Event>& given,
                            Mode mode = Mode::strict);

struct DeterministicEvidence {
    double joint = 0.0;
    double marginal_a = 0.0;
    double marginal_b = 0.0;
    bool deterministic = false;
};

/// True iff both conditional probabilities equal 1 within tol.det.
/// Throws when either marginal vanishes (relation undefined).
DeterministicEvidence is_deterministic(const Ensemble& ens,
                                       const SystemModel& model,
                                       const std::vector<Event>& a,
                                       const std::vector<Event>& b,
                                       Mode mode = Mode::strict);

bool is_exclusive(const Ensemble& ens, const SystemModel& model,
                  const std::vector<Event>& a, const std::vector<Event>& b,
                  Mode mode = Mode::strict);

bool is_independent(const Ensemble& ens, const SystemModel& model,
                    const std::vector<Event>& a, const std::vector<Event>& b,
                    Mode mode = Mode::strict);

/// (1 - p_tn) * p + p_fp * (1 - p), clamped to [0, 1].
double apply_misdetection(double p, const MisdetectionModel& m);

/// Pairwise outcome table for two propositions (and their negations).
struct PairTable {
    struct Row {
        std::string outcome_a, outcome_b;
        double joint = 0.0, marginal_a = 0.0, marginal_b = 0.0;
        double conditional_a_given_b = 0.0;
    };
    std::vector<Row> rows;
    std::string to_csv() const;
};

PairTable pair_table(const Ensemble& ens, const SystemModel& model,
                     const Event& a, const Event& b, Mode mode = Mode::strict);

}  // namespace hvt

#endif
