// io.hpp — deterministic CSV writing and a minimal diverging-colormap SVG
// heatmap for Wigner grids

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vibronic/core.hpp"
#include "vibronic/observables.hpp"

namespace vibronic::io {

inline constexpr int csv_schema_version = 1;

// %.12g rendering keeps runs byte-reproducible across reruns
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& task,
              const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path.string());
        out_ << "# vibronic csv v" << csv_schema_version << " task=" << task << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
        }
        width_ = columns.size();
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw std::invalid_argument("CsvWriter: wrong cell count");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
        }
    }

    void row_numbers(const std::vector<double>& cells) {
        std::vector<std::string> s;
        s.reserve(cells.size());
        for (double v : cells) s.push_back(format_number(v));
        row(s);
    }

private:
    std::ofstream out_;
    std::size_t width_ = 0;
};

// Linear diverging map with zero pinned to white; blue negative, red positive.
inline std::string diverging_color(double v, double vmax) {
    const double x = (vmax > 0) ? std::clamp(v / vmax, -1.0, 1.0) : 0.0;
    int r = 255, g = 255, b = 255;
    if (x > 0) {
        g = static_cast<int>(255 * (1.0 - x));
        b = static_cast<int>(255 * (1.0 - x));
    } else if (x < 0) {
        r = static_cast<int>(255 * (1.0 + x));
        g = static_cast<int>(255 * (1.0 + x));
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

inline void write_wigner_svg(const observables::WignerGrid& grid,
                             const std::filesystem::path& path) {
    const int nq = static_cast<int>(grid.q_axis.size());
    const int np = static_cast<int>(grid.p_axis.size());
    const int cell = 6;
    const int margin = 30;
    const int width = nq * cell + 2 * margin;
    const int height = np * cell + 2 * margin;
    const double vmax = grid.values.cwiseAbs().maxCoeff();

    std::ofstream svg(path);
    if (!svg) throw std::runtime_error("write_wigner_svg: cannot open " + path.string());
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int iq = 0; iq < nq; ++iq) {
        for (int ip = 0; ip < np; ++ip) {
            // p increases upward
            const int x = margin + iq * cell;
            const int y = margin + (np - 1 - ip) * cell;
            svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
                << cell << "\" fill=\"" << diverging_color(grid.values(iq, ip), vmax) << "\"/>\n";
        }
    }
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 8
        << "\" font-size=\"12\" text-anchor=\"middle\">q</text>\n";
    svg << "<text x=\"10\" y=\"" << height / 2 << "\" font-size=\"12\">p</text>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"18\" font-size=\"11\" text-anchor=\"middle\">"
        << "W range +-" << format_number(vmax) << "</text>\n";
    svg << "</svg>\n";
}

inline void write_wigner_csv(const observables::WignerGrid& grid,
                             const std::filesystem::path& path) {
    CsvWriter csv(path, "wigner", {"q", "p", "w"});
    for (Eigen::Index iq = 0; iq < grid.q_axis.size(); ++iq) {
        for (Eigen::Index ip = 0; ip < grid.p_axis.size(); ++ip) {
            csv.row_numbers({grid.q_axis(iq), grid.p_axis(ip), grid.values(iq, ip)});
        }
    }
}

}  // namespace vibronic::io
