#ifndef QGPE_CHECKPOINT_HPP
#define QGPE_CHECKPOINT_HPP

#include <fstream>
#include <variant>

#include <json.hpp>

#include "qgpe/cmps.hpp"

namespace qgpe {

using Json = nlohmann::ordered_json;

// qgpe-cmps-v1: complex numbers as [re, im], matrices nested row-major.

namespace detail {

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("checkpoint: malformed complex value");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("checkpoint: malformed matrix");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[i][c]);
    return m;
}

inline Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

inline Vector vector_from_json(const Json& j) {
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = complex_from_json(j[i]);
    return v;
}

}  // namespace detail

inline Json to_json(const UniformCmps& s) {
    Json j;
    j["format"] = "qgpe-cmps-v1";
    j["kind"] = "uniform";
    j["D"] = s.dim();
    j["Q"] = detail::matrix_to_json(s.Q);
    j["R"] = detail::matrix_to_json(s.R);
    return j;
}

inline Json to_json(const FiniteCmps& s) {
    Json j;
    j["format"] = "qgpe-cmps-v1";
    j["kind"] = "finite";
    j["D"] = s.dim();
    Json qs = Json::array(), rs = Json::array();
    for (const auto& m : s.Qs) qs.push_back(detail::matrix_to_json(m));
    for (const auto& m : s.Rs) rs.push_back(detail::matrix_to_json(m));
    j["Q"] = std::move(qs);
    j["R"] = std::move(rs);
    j["grid"] = s.grid;
    j["v1"] = detail::vector_to_json(s.v1);
    j["v2"] = detail::vector_to_json(s.v2);
    if (s.bc.kind == BoundaryCondition::Kind::Dirichlet)
        j["bc"] = Json{{"kind", "dirichlet"},
                       {"a", detail::complex_to_json(s.bc.a)},
                       {"b", detail::complex_to_json(s.bc.b)}};
    else
        j["bc"] = Json{{"kind", "neumann"}};
    return j;
}

using CheckpointState = std::variant<UniformCmps, FiniteCmps>;

inline CheckpointState checkpoint_from_json(const Json& j) {
    if (!j.contains("format") || j["format"] != "qgpe-cmps-v1")
        throw ConfigError("checkpoint: unknown format");
    const std::string kind = j.at("kind").get<std::string>();
    const int d = j.at("D").get<int>();
    if (kind == "uniform") {
        UniformCmps s{detail::matrix_from_json(j.at("Q")), detail::matrix_from_json(j.at("R"))};
        if (s.dim() != d) throw ConfigError("checkpoint: D mismatch");
        return s;
    }
    if (kind == "finite") {
        FiniteCmps s;
        s.grid = j.at("grid").get<std::vector<double>>();
        for (const auto& m : j.at("Q")) s.Qs.push_back(detail::matrix_from_json(m));
        for (const auto& m : j.at("R")) s.Rs.push_back(detail::matrix_from_json(m));
        s.v1 = detail::vector_from_json(j.at("v1"));
        s.v2 = detail::vector_from_json(j.at("v2"));
        const Json& bc = j.at("bc");
        if (bc.at("kind") == "dirichlet")
            s.bc = BoundaryCondition::dirichlet(detail::complex_from_json(bc.at("a")),
                                                detail::complex_from_json(bc.at("b")));
        else
            s.bc = BoundaryCondition::neumann();
        if (s.dim() != d) throw ConfigError("checkpoint: D mismatch");
        s.validate();
        return s;
    }
    throw ConfigError("checkpoint: unknown kind '" + kind + "'");
}

template <class StateT>
void save_checkpoint(const std::string& path, const StateT& s) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open checkpoint for writing: " + path);
    out << to_json(s).dump(2) << "\n";
}

inline CheckpointState load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open checkpoint: " + path);
    Json j = Json::parse(in);
    return checkpoint_from_json(j);
}

}  // namespace qgpe

#endif
