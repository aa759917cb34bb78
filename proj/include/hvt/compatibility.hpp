#ifndef HVT_COMPATIBILITY_HPP
#define HVT_COMPATIBILITY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hvt/propositions.hpp"

namespace hvt {

/// Time-ordered product of Heisenberg-picture projectors, latest time
/// leftmost. Tr[K rho K^dagger] is the probability of the history.
struct ChainOperator {
    // (projector, time), ordered so times are non-decreasing right-to-left;
    // factors.front() is the leftmost (latest) operator.
    std::vector<std::pair<PartialCharacteristic, double>> factors;
    ComplexMatrix matrix;
};

enum class Classification { type_i, type_ii, not_applicable };

struct PermutationResidual {
    std::vector<int> perm;   // positions into the subset, identity first
    double trace = 0.0;      // Tr[(PK) rho (PK)^dagger]
    double delta = 0.0;      // trace - trace(identity ordering), signed
    double residual = 0.0;   // |delta| / max(trace(identity), eps)
};

struct SubsetReport {
    int order = 0;                 // subset size
    std::vector<int> subset;       // indices into the atom list
    double worst_residual = 0.0;
    std::vector<PermutationResidual> per_permutation;
};

/// Outcome of the permutation-invariance check over every subset of the
/// proposition family. verdict == compatible iff worst_residual < tau.
struct CompatReport {
    std::vector<std::string> labels;
    std::vector<SubsetReport> subsets;
    double worst_residual = 0.0;
    int worst_order = 0;
    std::vector<int> worst_subset;
    bool compatible = false;
    Classification classification = Classification::not_applicable;
    bool sampled = false;  // true when permutations were subsampled

    /// First subset whose worst residual breaches tau, if any.
    const SubsetReport* first_failing(double tau) const;
    /// Within a failing subset, the first pair of atoms whose projectors do
    /// not commute. A failing subset always contains one.
    std::pair<int, int> noncommuting_pair(const SubsetReport& s,
                                          const std::vector<Event>& atoms) const;
};

/// Family of per-time partitions defining a set of histories.
struct HistoryFamily {
    std::vector<double> times;  // strictly increasing
    // partitions[i][c] = projector of cell c at times[i]; cells of one time
    // must be mutually orthogonal and sum to the identity.
    std::vector<std::vector<Event>> partitions;
};

struct HistoryOverlap {
    std::vector<int> left, right;  // cell choices per time
    double overlap = 0.0;          // |Tr[K rho K'^dagger]|
};

struct ConsistencyReport {
    std::vector<HistoryOverlap> overlaps;
    double worst_overlap = 0.0;
    bool consistent = false;
    CompatReport compat;  // permutation check over all cells at the last time
};

/// Builds the chain operator for time-tagged atoms. Atoms are stably sorted
/// by time; coincident times keep input order (callers gate coincident
/// conjunctions through compat_check).
ChainOperator chain(const SystemModel& model, const std::vector<Event>& atoms);

/// Permutation-invariance check of Assumption-style trace equality
///   Tr[K rho(t) K^dagger] = Tr[(PK) rho(t) (PK)^dagger]
/// over every subset of size 2..n of `atoms` (all evaluated at the common
/// time t with rho evolved to t) and every permutation of the subset.
/// Families over 6 atoms subsample 1000 permutations per oversized subset
/// with a fixed seed and set report.sampled. Families over 12 atoms exceed
/// the subset budget and are rejected.
CompatReport compat_check(const SystemModel& model, const DensityOperator& rho0,
                          const std::vector<Event>& atoms, double t);

/// Refines a compatible verdict: type_i iff K^dagger K = (PK)^dagger (PK)
/// holds as an operator identity for every subset and permutation.
Classification classify(const SystemModel& model, const DensityOperator& rho0,
                        const std::vector<Event>& atoms, double t);

/// Consistent-histories off-diagonal check for comparison: all pairwise
/// chain overlaps |Tr[K rho K'^dagger]| must vanish. Strictly stronger in
/// practice than compat_check, which is reported alongside.
ConsistencyReport consistency_check(const SystemModel& model,
                                    const DensityOperator& rho0,
                                    const HistoryFamily& family);

}  // namespace hvt

#endif
