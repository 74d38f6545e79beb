#include "parcelca/error.hpp"
#include "parcelca/io.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace parcelca::io {

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

} // namespace

VariableGrid parse_grid(const std::string& text) {
    std::istringstream in(text);
    VariableGrid g;
    bool have_ncols = false, have_nrows = false, have_x = false, have_y = false,
         have_cell = false;

    std::string line;
    std::size_t line_no = 0;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        const std::string key = upper(first);
        const bool header_key = key == "NCOLS" || key == "NROWS" || key == "XLLCORNER" ||
                                key == "YLLCORNER" || key == "CELLSIZE" ||
                                key == "NODATA_VALUE";
        if (header_key && values.empty()) {
            double v;
            if (!(ls >> v))
                throw IoError("grid line " + std::to_string(line_no) + ": missing value for " +
                              key);
            if (key == "NCOLS") {
                g.ncols = static_cast<int>(v);
                have_ncols = true;
            } else if (key == "NROWS") {
                g.nrows = static_cast<int>(v);
                have_nrows = true;
            } else if (key == "XLLCORNER") {
                g.origin.x = v;
                have_x = true;
            } else if (key == "YLLCORNER") {
                g.origin.y = v;
                have_y = true;
            } else if (key == "CELLSIZE") {
                g.cell_size = v;
                have_cell = true;
            } else {
                g.nodata = v;
            }
            continue;
        }
        // Data row: parse the first token again as a number.
        try {
            values.push_back(std::stod(first));
        } catch (const std::exception&) {
            throw IoError("grid line " + std::to_string(line_no) + ": unexpected token '" +
                          first + "'");
        }
        double v;
        while (ls >> v) values.push_back(v);
    }

    if (!(have_ncols && have_nrows && have_x && have_y && have_cell))
        throw IoError("grid: incomplete header (need NCOLS, NROWS, XLLCORNER, YLLCORNER, "
                      "CELLSIZE)");
    const std::size_t expected =
        static_cast<std::size_t>(g.ncols) * static_cast<std::size_t>(g.nrows);
    if (values.size() != expected)
        throw IoError("grid: expected " + std::to_string(expected) + " values, found " +
                      std::to_string(values.size()));
    g.values = std::move(values);
    g.validate();
    return g;
}

VariableGrid read_grid(const std::string& path) {
    try {
        return parse_grid(read_text_file(path));
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

std::string serialize_grid(const VariableGrid& g) {
    g.validate();
    std::ostringstream out;
    out << "NCOLS " << g.ncols << "\n";
    out << "NROWS " << g.nrows << "\n";
    out << "XLLCORNER " << format_double(g.origin.x) << "\n";
    out << "YLLCORNER " << format_double(g.origin.y) << "\n";
    out << "CELLSIZE " << format_double(g.cell_size) << "\n";
    out << "NODATA_VALUE " << format_double(g.nodata) << "\n";
    for (int r = 0; r < g.nrows; ++r) {
        for (int c = 0; c < g.ncols; ++c) {
            if (c > 0) out << ' ';
            out << format_double(g.at(c, r));
        }
        out << "\n";
    }
    return out.str();
}

void write_grid(const VariableGrid& g, const std::string& path) {
    write_text_file(path, serialize_grid(g));
}

} // namespace parcelca::io
