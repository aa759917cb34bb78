#include "hvt/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hvt/compatibility.hpp"
#include "hvt/expr.hpp"
#include "hvt/quantities.hpp"
#include "hvt/scenario_doc.hpp"
#include "hvt/scenarios.hpp"
#include "hvt/trials.hpp"

namespace hvt {

namespace {

using ordered_json = nlohmann::ordered_json;

struct UsageError : Error {
    using Error::Error;
};

struct CheckFailure : Error {
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

struct Flags {
    std::map<std::string, std::string> values;
    std::set<std::string> switches;

    bool has(const std::string& k) const {
        return values.count(k) || switches.count(k);
    }
    std::string get(const std::string& k, const std::string& fallback = "") const {
        auto it = values.find(k);
        return it == values.end() ? fallback : it->second;
    }
    double number(const std::string& k, double fallback) const {
        auto it = values.find(k);
        return it == values.end() ? fallback : std::stod(it->second);
    }
    long integer(const std::string& k, long fallback) const {
        auto it = values.find(k);
        return it == values.end() ? fallback : std::stol(it->second);
    }
};

const std::set<std::string> kSwitches = {"--permissive", "--help"};

Flags parse_flags(const std::vector<std::string>& args, std::size_t start,
                  std::vector<std::string>& positional) {
    Flags flags;
    for (std::size_t i = start; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) == 0) {
            if (kSwitches.count(a)) {
                flags.switches.insert(a);
            } else {
                if (i + 1 >= args.size())
                    throw UsageError("flag " + a + " needs a value");
                flags.values[a] = args[++i];
            }
        } else {
            positional.push_back(a);
        }
    }
    return flags;
}

void emit(const std::string& content, const Flags& flags, std::ostream& out) {
    std::string path = flags.get("--out");
    if (path.empty()) {
        out << content;
        if (!content.empty() && content.back() != '\n') out << "\n";
    } else {
        atomic_write(path, content);
    }
}

struct LoadedScenario {
    ScenarioDocument doc;
    SystemModel model;
    Ensemble ens;
    Mode mode = Mode::strict;
};

LoadedScenario load(const std::string& path, const Flags& flags) {
    LoadedScenario ls;
    ls.doc = parse_scenario(read_file(path));
    ls.model = load_system(ls.doc);
    DensityOperator rho = ls.doc.initial(ls.model.dim());
    validate_density(rho, ls.model.tol);
    ls.ens = Ensemble{std::move(rho), ls.doc.name};
    ls.mode = (ls.doc.permissive || flags.has("--permissive")) ? Mode::permissive
                                                               : Mode::strict;
    return ls;
}

Event event_from_doc(const LoadedScenario& ls, const std::string& label,
                     std::optional<double> time_override = {}) {
    auto it = ls.doc.propositions.find(label);
    if (it == ls.doc.propositions.end())
        throw UsageError("unknown proposition label: " + label);
    ElementaryProposition p{label, it->second.indices,
                            time_override.value_or(it->second.time)};
    return make_event(ls.model, p);
}

std::string compat_report_json(const CompatReport& report) {
    ordered_json j;
    j["order"] = report.worst_order;
    j["subset"] = report.worst_subset;
    j["worst_residual"] = report.worst_residual;
    j["verdict"] = report.compatible ? "compatible" : "incompatible";
    switch (report.classification) {
        case Classification::type_i: j["classification"] = "type_i"; break;
        case Classification::type_ii: j["classification"] = "type_ii"; break;
        default: j["classification"] = "n/a"; break;
    }
    j["sampled"] = report.sampled;
    j["labels"] = report.labels;
    return j.dump(2);
}

int cmd_check_compat(const std::vector<std::string>& pos, const Flags& flags,
                     std::ostream& out) {
    if (pos.empty()) throw UsageError("check-compat needs a scenario file");
    LoadedScenario ls = load(pos[0], flags);
    if (!flags.has("--props"))
        throw UsageError("check-compat needs --props LABEL,LABEL[,...]");
    std::vector<Event> atoms;
    double t = flags.number("--time", 0.0);
    for (const std::string& label : split_csv_list(flags.get("--props")))
        atoms.push_back(event_from_doc(ls, label, t));

    CompatReport report = compat_check(ls.model, ls.ens.rho0, atoms, t);
    if (report.compatible)
        report.classification = classify(ls.model, ls.ens.rho0, atoms, t);
    emit(compat_report_json(report), flags, out);
    return report.compatible ? 0 : 1;
}

int cmd_prob(const std::vector<std::string>& pos, const Flags& flags,
             std::ostream& out) {
    if (pos.empty()) throw UsageError("prob needs a scenario file");
    LoadedScenario ls = load(pos[0], flags);

    if (flags.has("--expr")) {
        LabelResolver resolve = [&](const std::string& label) {
            auto it = ls.doc.propositions.find(label);
            if (it == ls.doc.propositions.end())
                throw UsageError("unknown proposition label: " + label);
            return it->second.indices;
        };
        PropositionExpr expr = parse_expr(flags.get("--expr"), resolve);
        if (ls.mode == Mode::strict) {
            // Every expanded conjunction must pass the coincident-time gate.
            for (const ExpandedTerm& term : expand_expression(expr)) {
                std::vector<Event> atoms;
                for (const auto& atom : term.atoms)
                    atoms.push_back(make_event(ls.model, atom));
                if (atoms.size() >= 2) (void)joint(ls.ens, ls.model, atoms);
            }
        }
        Characteristic x = characteristic(expr, ls.model);
        double raw = (x.matrix * ls.ens.rho0.matrix).trace().real();
        ordered_json j;
        j["expr"] = pretty_print(expr);
        j["probability"] = std::clamp(raw, 0.0, 1.0);
        j["raw"] = raw;
        emit(j.dump(2), flags, out);
        return 0;
    }

    if (flags.has("--props")) {
        std::vector<std::string> labels = split_csv_list(flags.get("--props"));
        if (labels.size() == 2 && flags.get("--format") == "csv") {
            Event a = event_from_doc(ls, labels[0]);
            Event b = event_from_doc(ls, labels[1]);
            emit(pair_table(ls.ens, ls.model, a, b, ls.mode).to_csv(), flags,
                 out);
            return 0;
        }
        std::vector<Event> atoms;
        for (const std::string& label : labels)
            atoms.push_back(event_from_doc(ls, label));
        Probability p = joint(ls.ens, ls.model, atoms, ls.mode);
        ordered_json j;
        j["props"] = labels;
        j["probability"] = p.value;
        j["raw"] = p.raw;
        if (ls.mode == Mode::permissive) j["spread"] = p.spread;
        emit(j.dump(2), flags, out);
        return 0;
    }
    throw UsageError("prob needs --expr or --props");
}

int cmd_sample(const std::vector<std::string>& pos, const Flags& flags,
               std::ostream& out) {
    if (pos.empty()) throw UsageError("sample needs a scenario file");
    LoadedScenario ls = load(pos[0], flags);
    if (ls.doc.partitions.empty())
        throw UsageError("scenario document declares no partitions");

    std::vector<double> times;
    std::vector<std::vector<std::vector<int>>> cells;
    for (const auto& p : ls.doc.partitions) {
        times.push_back(p.time);
        cells.push_back(p.cells);
    }
    HistorySpec spec = make_history(ls.model, times, cells);

    const std::size_t n =
        static_cast<std::size_t>(flags.integer("--trials", 1000));
    const std::uint64_t seed =
        static_cast<std::uint64_t>(flags.integer("--seed", 1));
    std::vector<TrialRecord> trials =
        sample_trials(ls.ens, ls.model, spec, n, seed);
    emit(trials_to_csv(trials, spec), flags, out);

    if (flags.has("--stats")) {
        // --stats TIME_INDEX:CELL, target from the chain distribution.
        std::string spec_str = flags.get("--stats");
        auto colon = spec_str.find(':');
        if (colon == std::string::npos)
            throw UsageError("--stats expects TIME_INDEX:CELL");
        std::size_t ti = std::stoul(spec_str.substr(0, colon));
        int cell = std::stoi(spec_str.substr(colon + 1));
        if (ti >= spec.times.size() ||
            cell >= static_cast<int>(spec.partitions[ti].size()))
            throw UsageError("--stats indices out of range");
        std::vector<double> probs = history_distribution(ls.ens, ls.model, spec);
        double target = 0.0;
        for (std::size_t h = 0; h < probs.size(); ++h) {
            std::size_t rem = h;
            std::vector<int> outcome(spec.times.size());
            for (int i = static_cast<int>(spec.times.size()) - 1; i >= 0; --i) {
                outcome[i] = static_cast<int>(rem % spec.partitions[i].size());
                rem /= spec.partitions[i].size();
            }
            if (outcome[ti] == cell) target += probs[h];
        }
        EmpiricalStats stats = empirical_expectation(trials, ti, cell, target);
        std::string stats_path = flags.get("--stats-out");
        if (stats_path.empty())
            out << stats_to_json(stats) << "\n";
        else
            atomic_write(stats_path, stats_to_json(stats));
    }
    return 0;
}

int cmd_scenario(const std::vector<std::string>& pos, const Flags& flags,
                 std::ostream& out) {
    static const std::vector<std::string> names = {
        "spin_degenerate", "singlet_chsh", "entangled_pair", "cat_chain",
        "decay_toy",       "gleason_demo", "light_quantum"};
    if (pos.empty()) throw UsageError("scenario needs 'list' or 'run NAME'");

    if (pos[0] == "list") {
        std::string all;
        for (const auto& n : names) all += n + "\n";
        emit(all, flags, out);
        return 0;
    }
    if (pos[0] != "run" || pos.size() < 2)
        throw UsageError("scenario needs 'list' or 'run NAME'");
    const std::string& name = pos[1];

    ScenarioReport report;
    if (name == "spin_degenerate") {
        report = spin_degenerate(flags.number("--factor", 10.0));
    } else if (name == "singlet_chsh") {
        report = singlet_chsh(
            static_cast<std::uint64_t>(flags.integer("--seed", 12345)),
            static_cast<std::size_t>(flags.integer("--trials", 10000)));
    } else if (name == "entangled_pair") {
        std::vector<Complex> coeffs;
        for (const std::string& v :
             split_csv_list(flags.get("--coeffs", "0.547722557505166113,"
                                                  "0.836660026534075548")))
            coeffs.emplace_back(std::stod(v), 0.0);
        report = entangled_pair(coeffs);
    } else if (name == "cat_chain") {
        report = cat_chain(flags.number("--gamma", 1.0),
                           flags.number("--p-tn", 0.1),
                           flags.number("--p-fp", 0.02), {},
                           static_cast<std::uint64_t>(flags.integer("--seed", 2024)),
                           static_cast<std::size_t>(flags.integer("--trials", 2000)));
    } else if (name == "decay_toy") {
        report = decay_toy(static_cast<int>(flags.integer("--modes", 64)),
                           flags.number("--coupling", 0.318),
                           flags.number("--span", 40.0),
                           flags.number("--window", 0.0));
    } else if (name == "gleason_demo") {
        Ket psi(4);
        psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0, 0.0;
        std::vector<Ket> basis;
        for (int k = 0; k < 4; ++k) {
            Ket e = Ket::Zero(4);
            e(k) = 1.0;
            basis.push_back(e);
        }
        report = gleason_demo(psi, basis);
    } else if (name == "light_quantum") {
        double alpha = flags.number("--alpha", -1.0);
        FieldMode mode = alpha < 0.0 ? FieldMode::fock()
                                     : FieldMode::coherent(alpha);
        report = light_quantum(mode, flags.number("--coupling", 0.05),
                               flags.number("--tmax", 6.0));
    } else {
        throw UsageError("unknown scenario: " + name);
    }

    std::string csv_dir = flags.get("--csv-dir");
    if (!csv_dir.empty()) {
        std::filesystem::create_directories(csv_dir);
        for (const auto& table : report.tables)
            atomic_write(csv_dir + "/" + report.name + "_" + table.name + ".csv",
                         table.to_csv());
    }
    emit(report.to_json(), flags, out);
    return report.all_passed() ? 0 : 1;
}

int cmd_report(const std::vector<std::string>& pos, const Flags& flags,
               std::ostream& out) {
    if (pos.empty()) throw UsageError("report needs a scenario file");
    LoadedScenario ls = load(pos[0], flags);

    ordered_json root;
    root["name"] = ls.doc.name;
    root["dim"] = ls.model.dim();
    root["subsystem_dims"] = ls.doc.subsystem_dims;
    std::vector<double> energies(ls.model.basis.eigenvalues.data(),
                                 ls.model.basis.eigenvalues.data() + ls.model.dim());
    root["energies"] = energies;

    ordered_json marginals = ordered_json::object();
    for (const auto& [label, p] : ls.doc.propositions) {
        Event e = event_from_doc(ls, label);
        marginals[label] = joint(ls.ens, ls.model, {e}, ls.mode).value;
    }
    root["marginals"] = std::move(marginals);

    // Compatibility of propositions sharing a time tag.
    std::map<double, std::vector<std::string>> by_time;
    for (const auto& [label, p] : ls.doc.propositions)
        by_time[p.time].push_back(label);
    ordered_json compat = ordered_json::array();
    for (const auto& [t, labels] : by_time) {
        if (labels.size() < 2) continue;
        std::vector<Event> atoms;
        for (const auto& label : labels) atoms.push_back(event_from_doc(ls, label));
        CompatReport rep = compat_check(ls.model, ls.ens.rho0, atoms, t);
        ordered_json entry = ordered_json::parse(compat_report_json(rep));
        entry["time"] = t;
        compat.push_back(std::move(entry));
    }
    root["compat"] = std::move(compat);

    if (!ls.doc.grids.empty()) {
        ordered_json grids = ordered_json::object();
        for (const auto& [gname, gspec] : ls.doc.grids) {
            Grid grid = gspec.uniform
                            ? Grid::uniform(gspec.delta, gspec.i_min, gspec.i_max)
                            : Grid::from_anchors(gspec.anchors);
            grids[gname] = ordered_json{{"i_min", grid.i_min},
                                        {"i_max", grid.i_max()},
                                        {"anchors", grid.anchors}};
        }
        root["grids"] = std::move(grids);
    }

    if (!ls.doc.partitions.empty()) {
        HistoryFamily family;
        for (const auto& p : ls.doc.partitions) {
            family.times.push_back(p.time);
            std::vector<Event> cells;
            for (std::size_t c = 0; c < p.cells.size(); ++c)
                cells.push_back(Event{"cell" + std::to_string(c),
                                      projector(ls.model, p.cells[c]).matrix,
                                      p.time});
            family.partitions.push_back(std::move(cells));
        }
        ConsistencyReport rep = consistency_check(ls.model, ls.ens.rho0, family);
        root["consistency"] =
            ordered_json{{"consistent", rep.consistent},
                         {"worst_overlap", rep.worst_overlap},
                         {"compatible", rep.compat.compatible},
                         {"compat_worst_residual", rep.compat.worst_residual}};
    }
    emit(root.dump(2), flags, out);
    return 0;
}

const char kUsage[] =
    "usage: hvt <verb> [args]\n"
    "verbs:\n"
    "  check-compat FILE --props A,B[,..] --time T [--out F]\n"
    "  prob FILE (--expr \"A@0 AND B@1\" | --props A,B) [--format json|csv]\n"
    "            [--permissive] [--out F]\n"
    "  sample FILE --trials N --seed S [--out F] [--stats I:CELL [--stats-out F]]\n"
    "  scenario list | scenario run NAME [options] [--out F] [--csv-dir D]\n"
    "  report FILE [--out F]\n";

}  // namespace

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write: " + tmp);
        out << content;
        if (!content.empty() && content.back() != '\n') out << "\n";
    }
    std::filesystem::rename(tmp, path);
}

int cli_run(std::vector<std::string> args, std::ostream& out,
            std::ostream& err) {
    try {
        if (args.empty() || args[0] == "--help" || args[0] == "help") {
            out << kUsage;
            return args.empty() ? 2 : 0;
        }
        const std::string verb = args[0];
        std::vector<std::string> positional;
        Flags flags = parse_flags(args, 1, positional);

        if (verb == "check-compat") return cmd_check_compat(positional, flags, out);
        if (verb == "prob") return cmd_prob(positional, flags, out);
        if (verb == "sample") return cmd_sample(positional, flags, out);
        if (verb == "scenario") return cmd_scenario(positional, flags, out);
        if (verb == "report") return cmd_report(positional, flags, out);
        err << "unknown verb: " << verb << "\n" << kUsage;
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace hvt
