#include "hvt/scenario_doc.hpp"

#include <json.hpp>

namespace hvt {

using nlohmann::json;

namespace {

const json& require(const json& obj, const std::string& key,
                    const std::string& path) {
    if (!obj.is_object())
        throw SchemaError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaError(path + "/" + key, "missing required field");
    return *it;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
    return v.get<int>();
}

Complex as_complex(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2)
        throw SchemaError(path, "expected a [re, im] pair");
    return Complex(as_number(v[0], path + "/0"), as_number(v[1], path + "/1"));
}

ComplexMatrix as_matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty())
        throw SchemaError(path, "expected a non-empty array of rows");
    const std::size_t rows = v.size();
    if (!v[0].is_array() || v[0].empty())
        throw SchemaError(path + "/0", "expected a non-empty row");
    const std::size_t cols = v[0].size();
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::string rp = path + "/" + std::to_string(i);
        if (!v[i].is_array() || v[i].size() != cols)
            throw SchemaError(rp, "row length differs from the first row");
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = as_complex(v[i][j], rp + "/" + std::to_string(j));
    }
    return m;
}

Ket as_ket(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty())
        throw SchemaError(path, "expected a non-empty array of [re, im] pairs");
    Ket k(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        k(i) = as_complex(v[i], path + "/" + std::to_string(i));
    return k;
}

std::vector<int> as_index_list(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty())
        throw SchemaError(path, "expected a non-empty array of indices");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_int(v[i], path + "/" + std::to_string(i)));
    return out;
}

GridSpec as_grid(const json& v, const std::string& path) {
    GridSpec g;
    if (v.contains("anchors")) {
        const json& a = v["anchors"];
        if (!a.is_array() || a.empty())
            throw SchemaError(path + "/anchors", "expected a non-empty array");
        for (std::size_t i = 0; i < a.size(); ++i)
            g.anchors.push_back(as_number(a[i], path + "/anchors/" + std::to_string(i)));
        return g;
    }
    if (v.contains("uniform")) {
        const json& u = v["uniform"];
        g.uniform = true;
        g.delta = as_number(require(u, "delta", path + "/uniform"), path + "/uniform/delta");
        g.i_min = as_int(require(u, "i_min", path + "/uniform"), path + "/uniform/i_min");
        g.i_max = as_int(require(u, "i_max", path + "/uniform"), path + "/uniform/i_max");
        return g;
    }
    throw SchemaError(path, "expected \"anchors\" or \"uniform\"");
}

json complex_to_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

DensityOperator ScenarioDocument::initial(Eigen::Index dim) const {
    if (initial_density) {
        if (initial_density->rows() != dim)
            throw Error("initial density dimension mismatch");
        return DensityOperator{*initial_density};
    }
    if (initial_ket) {
        if (initial_ket->size() != dim)
            throw Error("initial ket dimension mismatch");
        return density_from_ket(*initial_ket);
    }
    return DensityOperator{
        ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim)};
}

ScenarioDocument parse_scenario(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error("scenario JSON syntax error at byte " +
                    std::to_string(e.byte) + ": " + e.what());
    }
    if (!root.is_object()) throw SchemaError("/", "expected a JSON object");

    ScenarioDocument doc;
    const json& name = require(root, "name", "");
    if (!name.is_string()) throw SchemaError("/name", "expected a string");
    doc.name = name.get<std::string>();

    const json& dims = require(root, "subsystem_dims", "");
    if (!dims.is_array() || dims.empty())
        throw SchemaError("/subsystem_dims", "expected a non-empty array");
    for (std::size_t i = 0; i < dims.size(); ++i)
        doc.subsystem_dims.push_back(
            as_int(dims[i], "/subsystem_dims/" + std::to_string(i)));

    doc.h0 = as_matrix(require(root, "h0", ""), "/h0");
    if (root.contains("h")) doc.h = as_matrix(root["h"], "/h");

    if (root.contains("initial")) {
        const json& init = root["initial"];
        if (init.contains("ket"))
            doc.initial_ket = as_ket(init["ket"], "/initial/ket");
        else if (init.contains("density"))
            doc.initial_density = as_matrix(init["density"], "/initial/density");
        else
            throw SchemaError("/initial", "expected \"ket\" or \"density\"");
    }

    if (root.contains("propositions")) {
        const json& props = root["propositions"];
        if (!props.is_object())
            throw SchemaError("/propositions", "expected an object");
        for (auto it = props.begin(); it != props.end(); ++it) {
            const std::string path = "/propositions/" + it.key();
            PropositionSpec p;
            p.indices = as_index_list(require(*it, "indices", path), path + "/indices");
            p.time = as_number(require(*it, "time", path), path + "/time");
            doc.propositions[it.key()] = std::move(p);
        }
    }

    if (root.contains("partitions")) {
        const json& parts = root["partitions"];
        if (!parts.is_array())
            throw SchemaError("/partitions", "expected an array");
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const std::string path = "/partitions/" + std::to_string(i);
            PartitionSpec p;
            p.time = as_number(require(parts[i], "time", path), path + "/time");
            const json& cells = require(parts[i], "cells", path);
            if (!cells.is_array() || cells.empty())
                throw SchemaError(path + "/cells", "expected a non-empty array");
            for (std::size_t c = 0; c < cells.size(); ++c)
                p.cells.push_back(as_index_list(
                    cells[c], path + "/cells/" + std::to_string(c)));
            doc.partitions.push_back(std::move(p));
        }
    }

    if (root.contains("grids")) {
        const json& grids = root["grids"];
        if (!grids.is_object()) throw SchemaError("/grids", "expected an object");
        for (auto it = grids.begin(); it != grids.end(); ++it)
            doc.grids[it.key()] = as_grid(*it, "/grids/" + it.key());
    }

    if (root.contains("tolerances")) {
        const json& tol = root["tolerances"];
        if (!tol.is_object())
            throw SchemaError("/tolerances", "expected an object");
        auto get = [&](const char* key, double& slot) {
            if (tol.contains(key)) slot = as_number(tol[key], std::string("/tolerances/") + key);
        };
        get("herm", doc.tolerances.herm);
        get("trace", doc.tolerances.trace);
        get("orth", doc.tolerances.orth);
        get("eig", doc.tolerances.eig);
        get("unit", doc.tolerances.unit);
        get("psd", doc.tolerances.psd);
        get("proj", doc.tolerances.proj);
        get("compat", doc.tolerances.compat);
        get("op", doc.tolerances.op);
        get("det", doc.tolerances.det);
        get("div", doc.tolerances.div);
        get("comm", doc.tolerances.comm);
    }

    if (root.contains("mode")) {
        const json& mode = root["mode"];
        if (!mode.is_string() ||
            (mode.get<std::string>() != "strict" &&
             mode.get<std::string>() != "permissive"))
            throw SchemaError("/mode", "expected \"strict\" or \"permissive\"");
        doc.permissive = mode.get<std::string>() == "permissive";
    }
    return doc;
}

std::string scenario_to_json(const ScenarioDocument& doc) {
    json root;
    root["name"] = doc.name;
    root["subsystem_dims"] = doc.subsystem_dims;
    root["h0"] = matrix_to_json(doc.h0);
    if (doc.h.size() != 0) root["h"] = matrix_to_json(doc.h);
    if (doc.initial_ket) {
        json ket = json::array();
        for (Eigen::Index i = 0; i < doc.initial_ket->size(); ++i)
            ket.push_back(complex_to_json((*doc.initial_ket)(i)));
        root["initial"] = json{{"ket", std::move(ket)}};
    } else if (doc.initial_density) {
        root["initial"] = json{{"density", matrix_to_json(*doc.initial_density)}};
    }
    if (!doc.propositions.empty()) {
        json props = json::object();
        for (const auto& [label, p] : doc.propositions)
            props[label] = json{{"indices", p.indices}, {"time", p.time}};
        root["propositions"] = std::move(props);
    }
    if (!doc.partitions.empty()) {
        json parts = json::array();
        for (const auto& p : doc.partitions)
            parts.push_back(json{{"time", p.time}, {"cells", p.cells}});
        root["partitions"] = std::move(parts);
    }
    if (!doc.grids.empty()) {
        json grids = json::object();
        for (const auto& [name, g] : doc.grids) {
            if (g.uniform)
                grids[name] = json{{"uniform",
                                    json{{"delta", g.delta},
                                         {"i_min", g.i_min},
                                         {"i_max", g.i_max}}}};
            else
                grids[name] = json{{"anchors", g.anchors}};
        }
        root["grids"] = std::move(grids);
    }
    root["mode"] = doc.permissive ? "permissive" : "strict";
    return root.dump(2);
}

}  // namespace hvt
