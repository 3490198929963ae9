#pragma once

// Facet-list text format: one facet per line, whitespace-separated integer
// vertex labels; `#` starts a comment; blank lines are ignored.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "collapsar/simplicial_complex.hpp"

namespace collapsar {

inline SimplicialComplex read_facet_list(std::istream& in) {
    std::vector<Face> facets;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ss(line);
        Face f;
        std::string tok;
        while (ss >> tok) {
            try {
                std::size_t pos = 0;
                int v = std::stoi(tok, &pos);
                if (pos != tok.size()) throw std::invalid_argument(tok);
                f.push_back(v);
            } catch (const std::exception&) {
                throw parse_error("vertex label is not an integer: '" + tok + "'", line_no);
            }
        }
        if (!f.empty()) facets.push_back(make_face(std::move(f)));
    }
    if (facets.empty()) throw parse_error("no facets found", line_no);
    return SimplicialComplex::from_facets(facets);
}

inline SimplicialComplex read_facet_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input_error("cannot open input file: " + path);
    return read_facet_list(in);
}

inline void write_facet_list(std::ostream& out, const SimplicialComplex& c) {
    for (const auto& f : c.facets()) {
        for (std::size_t i = 0; i < f.size(); ++i) out << (i ? " " : "") << f[i];
        out << "\n";
    }
}

}  // namespace collapsar
