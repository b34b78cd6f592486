#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "group.hpp"

// JSON group-spec files. Schema (see docs/group-spec.md):
//   name          string
//   hp_vertices   array, boundary positions of the polygon vertices in cyclic
//                 order; null stands for infinity
//   sides         array of letter labels; side i joins vertex i to vertex i+1
//   letters       object label -> { hat: <partner label>, matrix: [a,b,c,d] };
//                 the partner's matrix may be omitted (inverse is implied)
//   cusps         array of { rep: [a,b,c,d], width: w } or
//                 { rep: ..., stabilizer: [a,b,c,d] }
//   vertex_charts array of { B: [a,b,c,d], cusp: k }, one per vertex

namespace cuspdim {

inline RealMoebius matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4) throw std::runtime_error("matrix must be four reals");
    RealMoebius m{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    if (std::abs(m.det() - 1.0) > 1e-9)
        throw std::runtime_error("non-unimodular matrix in group spec");
    return m;
}

inline GroupPresentation group_from_json(const nlohmann::json& j) {
    detail::PolygonSpec spec;
    spec.name = j.value("name", "custom");
    for (const auto& v : j.at("hp_vertices")) {
        if (v.is_null())
            spec.hp_vertices.push_back(std::nullopt);
        else
            spec.hp_vertices.push_back(v.get<double>());
    }
    for (const auto& s : j.at("sides")) spec.side_letter.push_back(s.get<std::string>());
    for (auto it = j.at("letters").begin(); it != j.at("letters").end(); ++it) {
        const std::string label = it.key();
        const auto& body = it.value();
        spec.hat_of[label] = body.at("hat").get<std::string>();
        if (body.contains("matrix")) spec.matrix_of[label] = matrix_from_json(body.at("matrix"));
    }
    std::vector<double> widths;
    std::vector<std::optional<RealMoebius>> stabilizers;
    for (const auto& c : j.at("cusps")) {
        spec.cusp_reps.push_back(matrix_from_json(c.at("rep")));
        if (c.contains("stabilizer")) {
            stabilizers.push_back(matrix_from_json(c.at("stabilizer")));
            widths.push_back(0);
        } else {
            stabilizers.push_back(std::nullopt);
            widths.push_back(c.at("width").get<double>());
        }
    }
    for (const auto& vc : j.at("vertex_charts"))
        spec.vertex_charts.push_back({matrix_from_json(vc.at("B")), vc.at("cusp").get<int>()});

    GroupPresentation g = detail::build(spec);
    for (std::size_t k = 0; k < g.cusps.size(); ++k) {
        if (stabilizers[k])
            g.cusps[k].width = detail::cusp_width_from(g.cusps[k].rep.inverse(), *stabilizers[k]);
        else
            g.cusps[k].width = widths[k];
    }
    return g;
}

inline GroupPresentation load_group_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open group spec: " + path);
    nlohmann::json j;
    in >> j;
    GroupPresentation g = group_from_json(j);
    ValidationReport rep = validate(g);
    if (!rep.ok) {
        std::ostringstream msg;
        msg << "group spec failed validation:";
        for (const auto& c : rep.checks)
            if (c.applicable && !c.pass) msg << " " << c.name;
        throw std::runtime_error(msg.str());
    }
    return g;
}

}  // namespace cuspdim
