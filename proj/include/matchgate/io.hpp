#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "matchgate/character.hpp"
#include "matchgate/kasteleyn.hpp"
#include "matchgate/plane_graph.hpp"
#include "matchgate/rational.hpp"
#include "matchgate/signature.hpp"
#include "matchgate/skew.hpp"

namespace matchgate {

class FileError : public std::runtime_error {
public:
    FileError(std::string path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          path_(std::move(path)),
          line_(line) {}

    const std::string& path() const { return path_; }
    std::size_t line() const { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

namespace detail {

struct LineReader {
    std::istream& in;
    std::string path;
    std::size_t line_no = 0;

    /// Next meaningful line, stripped of comments and surrounding blanks.
    std::optional<std::string> next() {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto begin = line.find_first_not_of(" \t\r");
            if (begin == std::string::npos) continue;
            auto end = line.find_last_not_of(" \t\r");
            return line.substr(begin, end - begin + 1);
        }
        return std::nullopt;
    }

    [[noreturn]] void fail(const std::string& what) const { throw FileError(path, line_no, what); }
};

inline std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

inline int parse_label(const LineReader& r, const std::string& tok) {
    try {
        std::size_t used = 0;
        int v = std::stoi(tok, &used);
        if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        r.fail("expected a positive node label, got '" + tok + "'");
    }
}

inline GaussianRational parse_weight(const LineReader& r, const std::string& tok) {
    try {
        return GaussianRational::parse(tok);
    } catch (const ParseError& e) {
        r.fail("bad weight literal '" + tok + "': " + e.what());
    }
}

inline void expect_header(LineReader& r, const std::string& header) {
    auto line = r.next();
    if (!line || *line != header) r.fail("expected header '" + header + "'");
}

template <typename Validate>
inline void validate_at(LineReader& r, Validate&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        r.fail(e.what());
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// mg v1 / omg v1

namespace detail {

template <bool Oriented>
inline auto read_matchgate_body(std::istream& in, const std::string& path) {
    LineReader r{in, path};
    expect_header(r, Oriented ? "omg v1" : "matchgate v1");

    PlaneGraph g;
    std::map<std::pair<int, int>, bool> low_to_high;
    bool saw_external = false;
    while (auto line = r.next()) {
        auto tok = tokens(*line);
        const std::string& kind = tok[0];
        if (kind == "node") {
            if (tok.size() != 2) r.fail("node line needs one label");
            g.add_node(parse_label(r, tok[1]));
        } else if (kind == (Oriented ? "arc" : "edge")) {
            if (tok.size() != 4) r.fail(std::string(Oriented ? "arc" : "edge") + " line needs u v weight");
            int u = parse_label(r, tok[1]);
            int v = parse_label(r, tok[2]);
            if (u == v) r.fail("self loop");
            if (g.has_edge(u, v)) r.fail("duplicate edge");
            g.add_edge(u, v, parse_weight(r, tok[3]));
            if (Oriented) low_to_high[edge_key(u, v)] = u < v;
        } else if (kind == "rotation") {
            if (tok.size() < 2 || tok[1].back() != ':') r.fail("rotation line needs 'rotation <id>:'");
            std::string id = tok[1].substr(0, tok[1].size() - 1);
            int v = parse_label(r, id);
            if (g.rotation.count(v)) r.fail("duplicate rotation for node " + id);
            std::vector<int> rot;
            for (std::size_t i = 2; i < tok.size(); ++i) rot.push_back(parse_label(r, tok[i]));
            g.rotation[v] = std::move(rot);
        } else if (kind == "outer") {
            if (tok.size() != 3) r.fail("outer line needs u v");
            if (g.outer) r.fail("duplicate outer line");
            g.outer = Dart{parse_label(r, tok[1]), parse_label(r, tok[2])};
        } else if (kind == "external") {
            if (saw_external) r.fail("duplicate external line");
            saw_external = true;
            for (std::size_t i = 1; i < tok.size(); ++i)
                g.externals.push_back(parse_label(r, tok[i]));
        } else {
            r.fail("unknown directive '" + kind + "'");
        }
    }
    validate_at(r, [&] { g.validate(); });
    if constexpr (Oriented) {
        OrientedPlaneGraph h;
        h.base = std::move(g);
        h.low_to_high = std::move(low_to_high);
        return h;
    } else {
        return g;
    }
}

inline void write_matchgate_body(std::ostream& out, const PlaneGraph& g,
                                 const std::map<std::pair<int, int>, bool>* directions) {
    out << (directions ? "omg v1" : "matchgate v1") << "\n";
    for (int v : g.nodes) out << "node " << v << "\n";
    for (const auto& [key, w] : g.edges) {
        if (directions) {
            bool forward = directions->at(key);
            out << "arc " << (forward ? key.first : key.second) << " "
                << (forward ? key.second : key.first) << " " << w.str() << "\n";
        } else {
            out << "edge " << key.first << " " << key.second << " " << w.str() << "\n";
        }
    }
    for (const auto& [v, rot] : g.rotation) {
        if (rot.empty()) continue;
        // Canonical start: smallest neighbor first.
        auto begin = std::min_element(rot.begin(), rot.end());
        out << "rotation " << v << ":";
        for (std::size_t i = 0; i < rot.size(); ++i)
            out << " " << rot[(static_cast<std::size_t>(begin - rot.begin()) + i) % rot.size()];
        out << "\n";
    }
    if (g.outer) out << "outer " << g.outer->first << " " << g.outer->second << "\n";
    if (!g.externals.empty()) {
        out << "external";
        for (int e : g.externals) out << " " << e;
        out << "\n";
    }
}

}  // namespace detail

inline PlaneGraph read_matchgate(std::istream& in, const std::string& path = "<input>") {
    return detail::read_matchgate_body<false>(in, path);
}

inline OrientedPlaneGraph read_oriented_matchgate(std::istream& in,
                                                  const std::string& path = "<input>") {
    return detail::read_matchgate_body<true>(in, path);
}

inline void write_matchgate(std::ostream& out, const PlaneGraph& g) {
    detail::write_matchgate_body(out, g, nullptr);
}

inline void write_oriented_matchgate(std::ostream& out, const OrientedPlaneGraph& h) {
    detail::write_matchgate_body(out, h.base, &h.low_to_high);
}

// ---------------------------------------------------------------------------
// sig v1

inline SignatureVector read_signature(std::istream& in, const std::string& path = "<input>") {
    detail::LineReader r{in, path};
    auto header = r.next();
    if (!header) r.fail("empty file");
    auto tok = detail::tokens(*header);
    if (tok.size() != 4 || tok[0] != "sig" || tok[1] != "v1" || tok[2] != "arity")
        r.fail("expected header 'sig v1 arity <k>'");
    int k = 0;
    try {
        k = std::stoi(tok[3]);
    } catch (const std::exception&) {
        r.fail("bad arity '" + tok[3] + "'");
    }
    if (k < 0 || k > 24) r.fail("arity out of range");
    SignatureVector s = SignatureVector::zeros(k);
    while (auto line = r.next()) {
        auto t = detail::tokens(*line);
        if (t.size() != 2) r.fail("entry line needs '<bitstring> <weight>'");
        bool empty_bits = t[0] == "-";
        if (empty_bits ? k != 0 : static_cast<int>(t[0].size()) != k)
            r.fail("bitstring length does not match arity");
        RemovalPattern p{};
        try {
            p = RemovalPattern::from_string(t[0]);
        } catch (const std::exception& e) {
            r.fail(e.what());
        }
        if (!s.at(p.bits).is_zero()) r.fail("duplicate entry for " + t[0]);
        s.at(p.bits) = detail::parse_weight(r, t[1]);
    }
    return s;
}

/// Canonical form: entries sorted by bitstring as binary numbers, zeros omitted.
inline void write_signature(std::ostream& out, const SignatureVector& s) {
    out << "sig v1 arity " << s.arity << "\n";
    for (std::uint32_t a = 0; a < s.size(); ++a) {
        if (s.at(a).is_zero()) continue;
        out << RemovalPattern::from_index(s.arity, a).str() << " " << s.at(a).str() << "\n";
    }
}

// ---------------------------------------------------------------------------
// skew v1

inline SkewMatrix read_skew(std::istream& in, const std::string& path = "<input>") {
    detail::LineReader r{in, path};
    detail::expect_header(r, "skew v1");
    auto labels_line = r.next();
    if (!labels_line) r.fail("missing labels line");
    auto tok = detail::tokens(*labels_line);
    if (tok.empty() || tok[0] != "labels") r.fail("expected 'labels <id...>'");
    std::vector<int> labels;
    for (std::size_t i = 1; i < tok.size(); ++i) labels.push_back(detail::parse_label(r, tok[i]));
    std::map<std::pair<int, int>, GaussianRational> upper;
    while (auto line = r.next()) {
        auto t = detail::tokens(*line);
        if (t.size() != 4 || t[0] != "entry") r.fail("expected 'entry <u> <v> <weight>'");
        int u = detail::parse_label(r, t[1]);
        int v = detail::parse_label(r, t[2]);
        if (u >= v) r.fail("entries must satisfy u < v");
        if (upper.count({u, v})) r.fail("duplicate entry");
        upper[{u, v}] = detail::parse_weight(r, t[3]);
    }
    SkewMatrix m;
    detail::validate_at(r, [&] { m = SkewMatrix(labels, std::move(upper)); });
    return m;
}

inline void write_skew(std::ostream& out, const SkewMatrix& m) {
    out << "skew v1\nlabels";
    for (int v : m.labels()) out << " " << v;
    out << "\n";
    for (const auto& [key, w] : m.upper())
        out << "entry " << key.first << " " << key.second << " " << w.str() << "\n";
}

// ---------------------------------------------------------------------------
// gmg v1

inline GeneralMatchgate read_general_matchgate(std::istream& in,
                                               const std::string& path = "<input>") {
    detail::LineReader r{in, path};
    detail::expect_header(r, "gmg v1");
    GeneralMatchgate g;
    while (auto line = r.next()) {
        auto tok = detail::tokens(*line);
        const std::string& kind = tok[0];
        if (kind == "node") {
            if (tok.size() != 2) r.fail("node line needs one label");
            g.add_node(detail::parse_label(r, tok[1]));
        } else if (kind == "edge") {
            if (tok.size() != 4) r.fail("edge line needs u v weight");
            int u = detail::parse_label(r, tok[1]);
            int v = detail::parse_label(r, tok[2]);
            if (u == v) r.fail("self loop");
            g.add_edge(u, v, detail::parse_weight(r, tok[3]));
        } else if (kind == "inputs" || kind == "outputs" || kind == "omittable") {
            auto& target = kind == "inputs" ? g.inputs : kind == "outputs" ? g.outputs : g.omittable;
            if (!target.empty()) r.fail("duplicate " + kind + " line");
            for (std::size_t i = 1; i < tok.size(); ++i)
                target.push_back(detail::parse_label(r, tok[i]));
        } else {
            r.fail("unknown directive '" + kind + "'");
        }
    }
    detail::validate_at(r, [&] { g.validate(); });
    return g;
}

inline void write_general_matchgate(std::ostream& out, const GeneralMatchgate& g) {
    out << "gmg v1\n";
    for (int v : g.nodes) out << "node " << v << "\n";
    for (const auto& [key, w] : g.edges)
        out << "edge " << key.first << " " << key.second << " " << w.str() << "\n";
    auto list = [&](const char* name, const std::vector<int>& xs) {
        if (xs.empty()) return;
        out << name;
        for (int v : xs) out << " " << v;
        out << "\n";
    };
    list("inputs", g.inputs);
    list("outputs", g.outputs);
    list("omittable", g.omittable);
}

// ---------------------------------------------------------------------------
// Files

template <typename Reader>
auto read_file(const std::filesystem::path& path, Reader&& reader) {
    std::ifstream in(path);
    if (!in) throw FileError(path.string(), 0, "cannot open file");
    return reader(in, path.string());
}

/// Write-then-rename so partially written outputs are never observed.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FileError(tmp.string(), 0, "cannot open file for writing");
        out << content;
        if (!out) throw FileError(tmp.string(), 0, "write failed");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace matchgate
