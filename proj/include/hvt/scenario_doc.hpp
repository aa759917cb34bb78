#ifndef HVT_SCENARIO_DOC_HPP
#define HVT_SCENARIO_DOC_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hvt/qcore.hpp"

namespace hvt {

/// Schema violation. `path` is a JSON pointer to the first failing element.
struct SchemaError : Error {
    std::string path;
    SchemaError(std::string p, const std::string& what)
        : Error(what + " (at " + p + ")"), path(std::move(p)) {}
};

struct GridSpec {
    // Either explicit anchors (must include 0, strictly increasing) or a
    // uniform grid delta * i for i in [i_min, i_max].
    std::vector<double> anchors;
    bool uniform = false;
    double delta = 0.0;
    int i_min = 0;
    int i_max = 0;
};

struct PropositionSpec {
    std::vector<int> indices;
    double time = 0.0;
};

struct PartitionSpec {
    double time = 0.0;
    std::vector<std::vector<int>> cells;
};

struct ScenarioDocument {
    std::string name;
    std::vector<int> subsystem_dims;
    ComplexMatrix h0;
    ComplexMatrix h;                       // empty -> defaults to h0
    std::optional<Ket> initial_ket;
    std::optional<ComplexMatrix> initial_density;
    std::map<std::string, PropositionSpec> propositions;
    std::vector<PartitionSpec> partitions;
    std::map<std::string, GridSpec> grids;
    Tolerances tolerances;
    bool permissive = false;

    /// Initial ensemble: ket or density if given, else maximally mixed.
    DensityOperator initial(Eigen::Index dim) const;
};

/// Parses and schema-validates a scenario document from JSON text.
/// Throws SchemaError naming the first failing path, or Error on syntax
/// errors (with byte position).
ScenarioDocument parse_scenario(const std::string& text);

std::string scenario_to_json(const ScenarioDocument& doc);

}  // namespace hvt

#endif
