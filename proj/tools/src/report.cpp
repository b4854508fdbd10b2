/*
 * Copyright 2026 The scsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "scsim_cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace scsim::cli {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& comment,
                     const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << "# " << comment << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& v) {
    out_ << (in_row_++ ? "," : "") << v;
    return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(fmt(v)); }
CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }
CsvWriter& CsvWriter::cell(unsigned long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
    if (in_row_ != columns_) throw std::logic_error("CSV row has the wrong number of cells");
    out_ << '\n';
    in_row_ = 0;
}

namespace {

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

}  // namespace

void write_svg(const std::filesystem::path& path, const std::vector<Panel>& panels, int columns) {
    constexpr double kW = 320;
    constexpr double kH = 240;
    constexpr double kPad = 45;
    const int cols = std::max(1, std::min(columns, static_cast<int>(panels.size())));
    const int rows = (static_cast<int>(panels.size()) + cols - 1) / cols;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * kW << "\" height=\""
        << rows * kH << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const Panel& panel = panels[p];
        const double ox = static_cast<double>(p % cols) * kW;
        const double oy = static_cast<double>(p / cols) * kH;
        auto tx = [&](double x) { return panel.log_x ? std::log2(x) : x; };
        double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
        for (const auto& s : panel.series) {
            for (double x : s.x) x0 = std::min(x0, tx(x)), x1 = std::max(x1, tx(x));
            for (double y : s.y) y0 = std::min(y0, y), y1 = std::max(y1, y);
        }
        if (!(x1 > x0)) x1 = x0 + 1;
        if (!(y1 > y0)) y1 = y0 + 1;
        const double pw = kW - 2 * kPad;
        const double ph = kH - 2 * kPad;
        auto px = [&](double x) { return ox + kPad + (tx(x) - x0) / (x1 - x0) * pw; };
        auto py = [&](double y) { return oy + kH - kPad - (y - y0) / (y1 - y0) * ph; };

        out << "<g>\n<text x=\"" << ox + kW / 2 << "\" y=\"" << oy + 18
            << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(panel.title) << "</text>\n";
        out << "<rect x=\"" << ox + kPad << "\" y=\"" << oy + kPad << "\" width=\"" << pw << "\" height=\"" << ph
            << "\" fill=\"none\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << ox + kW / 2 << "\" y=\"" << oy + kH - 10 << "\" text-anchor=\"middle\">"
            << escape(panel.x_label) << "</text>\n";
        out << "<text x=\"" << ox + 12 << "\" y=\"" << oy + kH / 2 << "\" transform=\"rotate(-90 " << ox + 12
            << ' ' << oy + kH / 2 << ")\" text-anchor=\"middle\">" << escape(panel.y_label) << "</text>\n";
        out << "<text x=\"" << ox + kPad - 4 << "\" y=\"" << py(y0) << "\" text-anchor=\"end\">" << fmt(y0)
            << "</text>\n<text x=\"" << ox + kPad - 4 << "\" y=\"" << py(y1) + 8 << "\" text-anchor=\"end\">"
            << fmt(y1) << "</text>\n";
        const double lx0 = panel.log_x ? std::exp2(x0) : x0;
        const double lx1 = panel.log_x ? std::exp2(x1) : x1;
        out << "<text x=\"" << px(lx0) << "\" y=\"" << oy + kH - kPad + 12 << "\" text-anchor=\"middle\">"
            << fmt(lx0) << "</text>\n<text x=\"" << px(lx1) << "\" y=\"" << oy + kH - kPad + 12
            << "\" text-anchor=\"middle\">" << fmt(lx1) << "</text>\n";

        for (std::size_t si = 0; si < panel.series.size(); ++si) {
            const Series& s = panel.series[si];
            const char* color = kColors[si % std::size(kColors)];
            out << "<polyline fill=\"none\" stroke=\"" << color << "\"" << (s.dashed ? " stroke-dasharray=\"4 3\"" : "")
                << " points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) out << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
            out << "\"/>\n";
            if (s.markers && s.x.size() <= 64) {
                for (std::size_t i = 0; i < s.x.size(); ++i) {
                    if (si % 2 == 0) {
                        out << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
                            << "\" r=\"2.5\" fill=\"none\" stroke=\"" << color << "\"/>\n";
                    } else {
                        out << "<rect x=\"" << fmt(px(s.x[i]) - 2.5) << "\" y=\"" << fmt(py(s.y[i]) - 2.5)
                            << "\" width=\"5\" height=\"5\" fill=\"none\" stroke=\"" << color << "\"/>\n";
                    }
                }
            }
            out << "<text x=\"" << ox + kPad + 6 << "\" y=\"" << oy + kPad + 12 + 12 * static_cast<double>(si)
                << "\" fill=\"" << color << "\">" << escape(s.label) << "</text>\n";
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
}

void write_bar_svg(const std::filesystem::path& path, const std::string& title,
                   const std::vector<std::string>& series, const std::vector<BarGroup>& groups) {
    constexpr double kH = 260;
    constexpr double kPad = 40;
    const double bar = 10;
    const double group_w = bar * static_cast<double>(series.size()) + 8;
    const double width = 2 * kPad + group_w * static_cast<double>(groups.size());
    double vmax = 0;
    for (const auto& g : groups) for (double v : g.values) vmax = std::max(vmax, v);
    if (vmax <= 0) vmax = 1;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << kH
        << "\" font-family=\"sans-serif\" font-size=\"10\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"16\" text-anchor=\"middle\" font-size=\"12\">" << escape(title)
        << "</text>\n";
    const double base = kH - kPad;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const double gx = kPad + group_w * static_cast<double>(gi);
        for (std::size_t si = 0; si < groups[gi].values.size() && si < series.size(); ++si) {
            const double h = groups[gi].values[si] / vmax * (kH - 2 * kPad - 10);
            out << "<rect x=\"" << fmt(gx + bar * static_cast<double>(si)) << "\" y=\"" << fmt(base - h)
                << "\" width=\"" << bar - 1 << "\" height=\"" << fmt(h) << "\" fill=\"none\" stroke=\""
                << kColors[si % std::size(kColors)] << "\"" << (si % 2 ? " stroke-dasharray=\"3 2\"" : "") << "/>\n";
        }
        out << "<text x=\"" << fmt(gx + group_w / 2 - 4) << "\" y=\"" << base + 12 << "\" text-anchor=\"middle\">"
            << escape(groups[gi].label) << "</text>\n";
    }
    for (std::size_t si = 0; si < series.size(); ++si) {
        out << "<text x=\"" << kPad << "\" y=\"" << 30 + 12 * static_cast<double>(si) << "\" fill=\""
            << kColors[si % std::size(kColors)] << "\">" << escape(series[si]) << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace scsim::cli
