#ifndef HVT_TRIALS_HPP
#define HVT_TRIALS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hvt/probability.hpp"

namespace hvt {

/// Sequence of measurement times with a complete, mutually exclusive cell
/// partition at each time.
struct HistorySpec {
    std::vector<double> times;                   // strictly increasing
    std::vector<std::vector<Event>> partitions;  // cells per time
};

/// One sampled trial: the occupied cell per time and the jump times
/// (times at which the outcome differs from the previous one).
struct TrialRecord {
    long j = 0;
    std::vector<int> outcomes;       // cell index per time
    std::vector<double> jump_times;  // increasing
    std::uint64_t seed = 0;

    /// Logical variable of "cell occupied at times[time_index]".
    int x_value(std::size_t time_index, int cell) const {
        return outcomes.at(time_index) == cell ? 1 : 0;
    }
};

struct EmpiricalStats {
    std::size_t n_trials = 0;
    double mean = 0.0;
    double std_error = 0.0;            // sample std / sqrt(n)
    std::optional<double> target;      // trace-formula prediction
    std::optional<double> z_score;
};

HistorySpec make_history(const SystemModel& model, std::vector<double> times,
                         std::vector<std::vector<std::vector<int>>> cells);

void validate_history(const SystemModel& model, const HistorySpec& spec);

/// Samples one trial by sequential conditioning: evolve the conditioned
/// state to each time, draw a cell from Tr[P_c rho P_c], condition, repeat.
/// The joint outcome distribution equals the chain-operator probabilities.
/// Trial j of a base seed uses the stream SplitMix64::stream_seed(seed, j),
/// so parallel sampling order cannot change results.
TrialRecord sample_history(const Ensemble& ens, const SystemModel& model,
                           const HistorySpec& spec, std::uint64_t base_seed,
                           long j = 0);

/// Samples trials j = 0..n-1, parallelized over HVT_THREADS workers
/// (default: hardware concurrency). Output is identical for any thread count.
std::vector<TrialRecord> sample_trials(const Ensemble& ens,
                                       const SystemModel& model,
                                       const HistorySpec& spec, std::size_t n,
                                       std::uint64_t base_seed);

/// Number of jumps no later than t; a jump at exactly t counts.
int jump_count(const TrialRecord& trial, double t);

EmpiricalStats empirical_expectation(const std::vector<double>& values,
                                     std::optional<double> target = {});

/// Mean of a per-trial 0/1 variable over sampled records.
EmpiricalStats empirical_expectation(const std::vector<TrialRecord>& trials,
                                     std::size_t time_index, int cell,
                                     std::optional<double> target = {});

/// Chain-operator probability of every history the partitions admit,
/// indexed like history_index(). Reference distribution for fit tests.
std::vector<double> history_distribution(const Ensemble& ens,
                                         const SystemModel& model,
                                         const HistorySpec& spec);

std::size_t history_index(const HistorySpec& spec,
                          const std::vector<int>& outcomes);

/// CSV of sampled trials: header trial,time,cell,n; one row per (trial, time).
std::string trials_to_csv(const std::vector<TrialRecord>& trials,
                          const HistorySpec& spec);

std::string stats_to_json(const EmpiricalStats& s);

}  // namespace hvt

#endif
