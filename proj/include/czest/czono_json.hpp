#pragma once

// JSON encoding of constrained zonotopes:
//   {"G": [[...]], "c": [...], "A": [[...]], "b": [...], "h": [...]}
// Row-major matrices; +inf (and -inf in boxes) encoded as the strings
// "inf" / "-inf".

#include "czest/czono.hpp"

#include <json.hpp>

#include <cmath>
#include <string>

namespace czest::json_io
{

using json = nlohmann::json;

inline json encode_number(double v)
{
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    if (std::isnan(v)) throw std::invalid_argument("json: NaN is not encodable.");
    return json(v);
}

inline double decode_number(const json& j)
{
    if (j.is_number()) return j.get<double>();
    if (j.is_string())
    {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    throw ConfigError("json: expected a number or \"inf\", got " + j.dump());
}

inline json encode_vector(const Vector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(encode_number(v(i)));
    return out;
}

inline json encode_matrix(const Matrix& m)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(encode_number(m(i, j)));
        out.push_back(std::move(row));
    }
    return out;
}

inline Vector decode_vector(const json& j)
{
    if (!j.is_array()) throw ConfigError("json: expected an array for a vector.");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = decode_number(j[i]);
    return v;
}

// `cols` is needed for matrices with zero rows.
inline Matrix decode_matrix(const json& j, Eigen::Index cols = -1)
{
    if (!j.is_array()) throw ConfigError("json: expected an array of rows for a matrix.");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Matrix(0, cols < 0 ? 0 : cols);
    if (!j[0].is_array()) throw ConfigError("json: matrix rows must be arrays.");
    const auto nc = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, nc);
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        const auto& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != nc)
            throw ConfigError("json: ragged matrix rows.");
        for (Eigen::Index k = 0; k < nc; ++k) m(i, k) = decode_number(row[static_cast<size_t>(k)]);
    }
    return m;
}

inline json to_json(const ConstrainedZonotope& z)
{
    return json{{"G", encode_matrix(z.G())},
                {"c", encode_vector(z.c())},
                {"A", encode_matrix(z.A())},
                {"b", encode_vector(z.b())},
                {"h", encode_vector(z.h())}};
}

inline ConstrainedZonotope cz_from_json(const json& j)
{
    for (const char* key : {"G", "c", "h"})
        if (!j.contains(key)) throw ConfigError(std::string("constrained zonotope: missing key \"") + key + "\".");
    Vector c = decode_vector(j.at("c"));
    Vector h = decode_vector(j.at("h"));
    Matrix G = decode_matrix(j.at("G"), h.size());
    if (G.rows() == 0 && c.size() > 0) G.resize(c.size(), h.size());
    Matrix A = j.contains("A") ? decode_matrix(j.at("A"), h.size()) : Matrix(0, h.size());
    Vector b = j.contains("b") ? decode_vector(j.at("b")) : Vector(0);
    try
    {
        return ConstrainedZonotope(std::move(G), std::move(c), std::move(A), std::move(b), std::move(h));
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(std::string("constrained zonotope: ") + e.what());
    }
}

inline json to_json(const Box& b) { return json{{"lo", encode_vector(b.lo)}, {"hi", encode_vector(b.hi)}}; }

inline Box box_from_json(const json& j)
{
    if (!j.contains("lo") || !j.contains("hi")) throw ConfigError("box: expected keys \"lo\" and \"hi\".");
    try
    {
        return Box(decode_vector(j.at("lo")), decode_vector(j.at("hi")));
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(std::string("box: ") + e.what());
    }
}

} // namespace czest::json_io
