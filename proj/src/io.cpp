#include "rpe/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rpe/errors.hpp"

namespace rpe {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw validation_error("trailing characters in number: " + s);
        return v;
    } catch (const std::invalid_argument&) {
        throw validation_error("not a number: " + s);
    } catch (const std::out_of_range&) {
        throw validation_error("number out of range: " + s);
    }
}

} // namespace

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write file: " + path);
    out << content;
    if (!out) throw validation_error("write failed: " + path);
}

std::string points_to_csv(const PointSet& S, const std::vector<uint32_t>* labels) {
    if (labels && labels->size() != S.n)
        throw validation_error("label count does not match the point count");
    std::string out;
    if (S.d == 2) {
        out += "x,y";
    } else if (S.d == 3) {
        out += "x,y,z";
    } else {
        for (size_t c = 0; c < S.d; ++c) {
            if (c) out += ',';
            out += "c" + std::to_string(c);
        }
    }
    if (labels) out += ",label";
    out += '\n';
    for (size_t i = 0; i < S.n; ++i) {
        for (size_t c = 0; c < S.d; ++c) {
            if (c) out += ',';
            out += format_g17(S.at(i, c));
        }
        if (labels) out += "," + std::to_string((*labels)[i]);
        out += '\n';
    }
    return out;
}

PointSet points_from_csv(const std::string& text, std::vector<uint32_t>* labels_out) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw validation_error("empty points CSV");
    std::vector<std::string> header = split(line, ',');
    bool has_label = !header.empty() && header.back() == "label";
    size_t d = header.size() - (has_label ? 1 : 0);
    if (d == 0) throw validation_error("points CSV has no coordinate columns");

    PointSet S;
    S.d = d;
    if (labels_out) labels_out->clear();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells = split(line, ',');
        if (cells.size() != header.size())
            throw validation_error("points CSV row has wrong column count");
        for (size_t c = 0; c < d; ++c) S.coords.push_back(parse_double(cells[c]));
        if (has_label && labels_out)
            labels_out->push_back(uint32_t(std::stoul(cells.back())));
        ++S.n;
    }
    validate(S);
    return S;
}

nlohmann::json points_to_json(const PointSet& S) {
    nlohmann::json rows = nlohmann::json::array();
    for (size_t i = 0; i < S.n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (size_t c = 0; c < S.d; ++c) row.push_back(S.at(i, c));
        rows.push_back(std::move(row));
    }
    return {{"n", S.n}, {"d", S.d}, {"points", std::move(rows)}};
}

PointSet points_from_json(const nlohmann::json& j) {
    try {
        PointSet S;
        S.d = j.at("d").get<size_t>();
        for (const auto& row : j.at("points")) {
            if (row.size() != S.d) throw validation_error("point row has wrong dimension");
            for (const auto& v : row) S.coords.push_back(v.get<double>());
            ++S.n;
        }
        validate(S);
        return S;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("bad points JSON: ") + e.what());
    }
}

nlohmann::json anchors_to_json(const AnchorSet& A) {
    nlohmann::json centers = nlohmann::json::array();
    for (size_t jx = 0; jx < A.k; ++jx) {
        nlohmann::json row = nlohmann::json::array();
        for (size_t c = 0; c < A.d; ++c) row.push_back(A.at(jx, c));
        centers.push_back(std::move(row));
    }
    return {{"k", A.k},
            {"d", A.d},
            {"alpha", A.alpha},
            {"scale_mode", to_string(A.scale_mode)},
            {"centers", std::move(centers)}};
}

AnchorSet anchors_from_json(const nlohmann::json& j) {
    try {
        AnchorSet A;
        A.d = j.at("d").get<size_t>();
        A.alpha = j.at("alpha").get<double>();
        A.scale_mode = scale_mode_from_string(j.at("scale_mode").get<std::string>());
        for (const auto& row : j.at("centers")) {
            if (row.size() != A.d) throw validation_error("anchor row has wrong dimension");
            for (const auto& v : row) A.centers.push_back(v.get<double>());
            ++A.k;
        }
        if (A.k == 0) throw validation_error("anchor set is empty");
        return A;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("bad anchors JSON: ") + e.what());
    }
}

nlohmann::json halfspaces_to_json(const HalfspaceSet& H) {
    nlohmann::json normals = nlohmann::json::array();
    for (size_t t = 0; t < H.m; ++t) {
        nlohmann::json row = nlohmann::json::array();
        for (size_t c = 0; c < H.d; ++c) row.push_back(H.w[t * H.d + c]);
        normals.push_back(std::move(row));
    }
    return {{"m", H.m}, {"d", H.d}, {"tau", H.tau}, {"w", std::move(normals)}, {"b", H.b}};
}

HalfspaceSet halfspaces_from_json(const nlohmann::json& j) {
    try {
        HalfspaceSet H;
        H.d = j.at("d").get<size_t>();
        H.tau = j.at("tau").get<double>();
        for (const auto& row : j.at("w")) {
            if (row.size() != H.d) throw validation_error("halfspace normal has wrong dimension");
            for (const auto& v : row) H.w.push_back(v.get<double>());
            ++H.m;
        }
        H.b = j.at("b").get<std::vector<double>>();
        if (H.b.size() != H.m) throw validation_error("offset count does not match normals");
        if (H.m == 0) throw validation_error("halfspace set is empty");
        return H;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("bad halfspaces JSON: ") + e.what());
    }
}

nlohmann::json oracle_result_to_json(const OraclePartitionResult& r,
                                     const std::vector<ArrangementLine>* lines) {
    nlohmann::json j = {{"entropy_nats", r.entropy_nats},
                        {"entropy_normalized", r.entropy_normalized},
                        {"labels", r.partition.labels},
                        {"part_sizes", r.partition.part_sizes}};
    if (lines) {
        nlohmann::json jl = nlohmann::json::array();
        for (const auto& line : *lines) jl.push_back({{"w", line.w}, {"b", line.b}});
        j["lines"] = std::move(jl);
    }
    return j;
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
    std::string out = "step,chamfer,entropy,stability,total,lr\n";
    for (const TraceRow& r : trace) {
        out += std::to_string(r.step) + ',' + format_g17(r.chamfer) + ',' + format_g17(r.entropy) +
               ',' + format_g17(r.stability) + ',' + format_g17(r.total) + ',' + format_g17(r.lr) +
               '\n';
    }
    return out;
}

nlohmann::json parse_json(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("bad JSON: ") + e.what());
    }
}

} // namespace rpe
