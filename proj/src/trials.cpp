#include "hvt/trials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <thread>

#include "hvt/rng.hpp"

namespace hvt {

namespace {

int worker_count(std::size_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("HVT_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

HistorySpec make_history(const SystemModel& model, std::vector<double> times,
                         std::vector<std::vector<std::vector<int>>> cells) {
    if (times.size() != cells.size())
        throw Error("make_history: times/cells size mismatch");
    HistorySpec spec;
    spec.times = std::move(times);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        std::vector<Event> partition;
        for (std::size_t c = 0; c < cells[i].size(); ++c) {
            char label[64];
            std::snprintf(label, sizeof(label), "t%zu/cell%zu", i, c);
            partition.push_back(Event{
                label, projector(model, cells[i][c]).matrix, spec.times[i]});
        }
        spec.partitions.push_back(std::move(partition));
    }
    validate_history(model, spec);
    return spec;
}

void validate_history(const SystemModel& model, const HistorySpec& spec) {
    if (spec.times.empty() || spec.times.size() != spec.partitions.size())
        throw Error("history: times/partitions size mismatch");
    for (std::size_t i = 1; i < spec.times.size(); ++i)
        if (!(spec.times[i] > spec.times[i - 1]))
            throw Error("history: times must be strictly increasing");
    const Eigen::Index n = model.dim();
    for (const auto& partition : spec.partitions) {
        if (partition.empty()) throw Error("history: empty partition");
        ComplexMatrix sum = ComplexMatrix::Zero(n, n);
        for (std::size_t a = 0; a < partition.size(); ++a) {
            sum += partition[a].z;
            for (std::size_t b = a + 1; b < partition.size(); ++b)
                if (frob(ComplexMatrix(partition[a].z * partition[b].z)) > 1e-10)
                    throw Error("history: partition cells are not disjoint");
        }
        if (frob(ComplexMatrix(sum - ComplexMatrix::Identity(n, n))) > 1e-9)
            throw Error("history: partition is not exhaustive");
    }
}

namespace {

// One unitary per step; reused across trials so that sampling does not
// rediagonalize the Hamiltonian per trial.
std::vector<ComplexMatrix> step_unitaries(const SystemModel& model,
                                          const HistorySpec& spec) {
    std::vector<ComplexMatrix> us;
    double prev = 0.0;
    for (double t : spec.times) {
        const double dt = t - prev;
        us.push_back(dt == 0.0
                         ? ComplexMatrix::Identity(model.dim(), model.dim())
                         : unitary_evolution(model.h, dt, model.tol.herm));
        prev = t;
    }
    return us;
}

std::size_t draw_cell(SplitMix64& rng, const std::vector<double>& probs,
                      double total, double t) {
    if (total <= 1e-12)
        throw Error("sample_history: degenerate partition (total probability "
                    "vanishes at t=" + std::to_string(t) + ")");
    const double u01 = rng.next_double() * total;
    double acc = 0.0;
    for (std::size_t c = 0; c < probs.size(); ++c) {
        acc += probs[c];
        if (u01 < acc) return c;
    }
    return probs.size() - 1;
}

// Purity of the initial ensemble decides the representation: a pure state
// stays pure under projective conditioning, so those trials push a ket
// (one matvec per step) instead of a density matrix.
TrialRecord sample_one(const Ensemble& ens, const HistorySpec& spec,
                       const std::vector<ComplexMatrix>& us,
                       const Ket* pure_initial, std::uint64_t base_seed,
                       long j) {
    TrialRecord rec;
    rec.j = j;
    rec.seed = SplitMix64::stream_seed(base_seed, static_cast<std::uint64_t>(j));
    SplitMix64 rng(rec.seed);

    Ket psi;
    ComplexMatrix rho;
    if (pure_initial)
        psi = *pure_initial;
    else
        rho = ens.rho0.matrix;

    for (std::size_t i = 0; i < spec.times.size(); ++i) {
        const auto& cells = spec.partitions[i];
        std::vector<double> probs(cells.size());
        double total = 0.0;
        std::size_t chosen;
        if (pure_initial) {
            psi = us[i] * psi;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                probs[c] = std::max(
                    0.0, (psi.adjoint() * cells[c].z * psi)(0, 0).real());
                total += probs[c];
            }
            chosen = draw_cell(rng, probs, total, spec.times[i]);
            psi = cells[chosen].z * psi;
            psi /= psi.norm();
        } else {
            rho = us[i] * rho * us[i].adjoint();
            for (std::size_t c = 0; c < cells.size(); ++c) {
                probs[c] = std::max(0.0, (cells[c].z * rho).trace().real());
                total += probs[c];
            }
            chosen = draw_cell(rng, probs, total, spec.times[i]);
            rho = cells[chosen].z * rho * cells[chosen].z;
            rho /= rho.trace().real();
        }
        rec.outcomes.push_back(static_cast<int>(chosen));
        if (i > 0 && rec.outcomes[i] != rec.outcomes[i - 1])
            rec.jump_times.push_back(spec.times[i]);
    }
    return rec;
}

// Principal eigenvector when the ensemble is numerically rank one.
std::optional<Ket> pure_part(const DensityOperator& rho) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix);
    const Eigen::Index last = rho.dim() - 1;
    if (es.eigenvalues()(last) < 1.0 - 1e-12) return std::nullopt;
    return Ket(es.eigenvectors().col(last));
}

}  // namespace

TrialRecord sample_history(const Ensemble& ens, const SystemModel& model,
                           const HistorySpec& spec, std::uint64_t base_seed,
                           long j) {
    std::optional<Ket> psi = pure_part(ens.rho0);
    return sample_one(ens, spec, step_unitaries(model, spec),
                      psi ? &*psi : nullptr, base_seed, j);
}

std::vector<TrialRecord> sample_trials(const Ensemble& ens,
                                       const SystemModel& model,
                                       const HistorySpec& spec, std::size_t n,
                                       std::uint64_t base_seed) {
    validate_history(model, spec);
    const std::vector<ComplexMatrix> us = step_unitaries(model, spec);
    const std::optional<Ket> psi = pure_part(ens.rho0);
    const Ket* psi_ptr = psi ? &*psi : nullptr;
    std::vector<TrialRecord> out(n);
    const int workers = worker_count(n);
    if (workers <= 1) {
        for (std::size_t j = 0; j < n; ++j)
            out[j] = sample_one(ens, spec, us, psi_ptr, base_seed,
                                static_cast<long>(j));
        return out;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t j = w; j < n; j += workers)
                out[j] = sample_one(ens, spec, us, psi_ptr, base_seed,
                                    static_cast<long>(j));
        });
    for (auto& t : pool) t.join();
    return out;
}

int jump_count(const TrialRecord& trial, double t) {
    int count = 0;
    for (double jt : trial.jump_times)
        if (jt <= t) ++count;  // a jump at exactly t counts
    return count;
}

EmpiricalStats empirical_expectation(const std::vector<double>& values,
                                     std::optional<double> target) {
    if (values.size() < 2)
        throw Error("empirical_expectation: need at least two trials");
    EmpiricalStats s;
    s.n_trials = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    double sample_std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    s.std_error = sample_std / std::sqrt(static_cast<double>(values.size()));
    s.target = target;
    if (target) {
        if (s.std_error > 0.0)
            s.z_score = (s.mean - *target) / s.std_error;
        else
            s.z_score = (s.mean == *target)
                            ? 0.0
                            : std::numeric_limits<double>::infinity();
    }
    return s;
}

EmpiricalStats empirical_expectation(const std::vector<TrialRecord>& trials,
                                     std::size_t time_index, int cell,
                                     std::optional<double> target) {
    std::vector<double> values;
    values.reserve(trials.size());
    for (const auto& t : trials)
        values.push_back(static_cast<double>(t.x_value(time_index, cell)));
    return empirical_expectation(values, target);
}

std::size_t history_index(const HistorySpec& spec,
                          const std::vector<int>& outcomes) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < spec.partitions.size(); ++i)
        idx = idx * spec.partitions[i].size() + static_cast<std::size_t>(outcomes[i]);
    return idx;
}

std::vector<double> history_distribution(const Ensemble& ens,
                                         const SystemModel& model,
                                         const HistorySpec& spec) {
    validate_history(model, spec);
    std::size_t n_hist = 1;
    for (const auto& p : spec.partitions) n_hist *= p.size();
    if (n_hist > 65536) throw Error("history_distribution: too many histories");

    std::vector<std::vector<ComplexMatrix>> zh(spec.times.size());
    for (std::size_t i = 0; i < spec.times.size(); ++i) {
        ComplexMatrix u = unitary_evolution(model.h, spec.times[i],
                                            model.tol.herm);
        for (const auto& cell : spec.partitions[i])
            zh[i].push_back(u.adjoint() * cell.z * u);
    }

    std::vector<double> probs(n_hist, 0.0);
    std::vector<int> outcome(spec.times.size(), 0);
    for (std::size_t hidx = 0; hidx < n_hist; ++hidx) {
        std::size_t rem = hidx;
        for (int i = static_cast<int>(spec.times.size()) - 1; i >= 0; --i) {
            outcome[i] = static_cast<int>(rem % spec.partitions[i].size());
            rem /= spec.partitions[i].size();
        }
        ComplexMatrix k = zh[0][outcome[0]];
        for (std::size_t i = 1; i < spec.times.size(); ++i)
            k = zh[i][outcome[i]] * k;
        probs[hidx] =
            std::max(0.0, (k * ens.rho0.matrix * k.adjoint()).trace().real());
    }
    return probs;
}

std::string trials_to_csv(const std::vector<TrialRecord>& trials,
                          const HistorySpec& spec) {
    std::string out = "trial,time,cell,n\n";
    char buf[160];
    for (const auto& trial : trials)
        for (std::size_t i = 0; i < spec.times.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%ld,%.17g,%d,%d\n", trial.j,
                          spec.times[i], trial.outcomes[i],
                          jump_count(trial, spec.times[i]));
            out += buf;
        }
    return out;
}

std::string stats_to_json(const EmpiricalStats& s) {
    char buf[320];
    std::string out = "{";
    std::snprintf(buf, sizeof(buf), "\"n_trials\":%zu,\"mean\":%.17g,\"std_error\":%.17g",
                  s.n_trials, s.mean, s.std_error);
    out += buf;
    if (s.target) {
        std::snprintf(buf, sizeof(buf), ",\"target\":%.17g", *s.target);
        out += buf;
    } else {
        out += ",\"target\":null";
    }
    if (s.z_score) {
        std::snprintf(buf, sizeof(buf), ",\"z_score\":%.17g", *s.z_score);
        out += buf;
    } else {
        out += ",\"z_score\":null";
    }
    out += "}";
    return out;
}

}  // namespace hvt
