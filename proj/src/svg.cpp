#include "dqn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dqn {

namespace {

constexpr double kPanel = 300.0;   // panel width and height
constexpr double kRadius = 120.0;  // sphere radius in pixels
constexpr double kTop = 50.0;      // space for titles
constexpr std::size_t kBins = 30;

const char* colour(std::size_t label) {
    static const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette[label % 10];
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string class_name(const std::vector<std::string>& names, std::size_t label) {
    return label < names.size() ? names[label] : "class " + std::to_string(label);
}

// Orthographic projection panel: `h` and `v` pick the Bloch components shown
// on the horizontal and vertical axes (0 = Q1, 1 = Q2, 2 = Q3).
void sphere_panel(std::ostringstream& out, double x0, const TrajectoryRecord& rec, int h, int v,
                  const std::string& title, const std::string& h_label, const std::string& v_label) {
    const double cx = x0 + kPanel / 2;
    const double cy = kTop + kPanel / 2;
    out << "<g>\n";
    out << "<text x=\"" << num(cx) << "\" y=\"" << num(kTop - 12) << "\" text-anchor=\"middle\">" << title
        << "</text>\n";
    out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(kRadius)
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<line x1=\"" << num(cx - kRadius) << "\" y1=\"" << num(cy) << "\" x2=\"" << num(cx + kRadius)
        << "\" y2=\"" << num(cy) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(cy - kRadius) << "\" x2=\"" << num(cx) << "\" y2=\""
        << num(cy + kRadius) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    out << "<text x=\"" << num(cx + kRadius + 4) << "\" y=\"" << num(cy + 4) << "\" font-size=\"11\">" << h_label
        << "</text>\n";
    out << "<text x=\"" << num(cx + 4) << "\" y=\"" << num(cy - kRadius - 4) << "\" font-size=\"11\">" << v_label
        << "</text>\n";

    const auto component = [](const BlochVector& b, int axis) { return axis == 0 ? b.q1 : axis == 1 ? b.q2 : b.q3; };
    for (const auto& p : rec.points) {
        const char* c = colour(p.label);
        out << "<circle cx=\"" << num(cx + kRadius * component(p.pre_su2, h)) << "\" cy=\""
            << num(cy - kRadius * component(p.pre_su2, v)) << "\" r=\"2.5\" fill=\"none\" stroke=\"" << c
            << "\" stroke-opacity=\"0.5\"/>\n";
        out << "<circle cx=\"" << num(cx + kRadius * component(p.post_su2, h)) << "\" cy=\""
            << num(cy - kRadius * component(p.post_su2, v)) << "\" r=\"2.5\" fill=\"" << c
            << "\" fill-opacity=\"0.7\"/>\n";
    }
    out << "</g>\n";
}

void histogram_panel(std::ostringstream& out, double x0, const TrajectoryRecord& rec, std::size_t n_labels) {
    const double left = x0 + 30;
    const double width = kPanel - 40;
    const double bottom = kTop + kPanel - 30;
    const double height = kPanel - 50;
    out << "<g>\n<text x=\"" << num(x0 + kPanel / 2) << "\" y=\"" << num(kTop - 12)
        << "\" text-anchor=\"middle\">encoded input x~</text>\n";
    out << "<line x1=\"" << num(left) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(left + width) << "\" y2=\""
        << num(bottom) << "\" stroke=\"#444\"/>\n";
    if (rec.points.empty()) {
        out << "</g>\n";
        return;
    }

    auto [lo_it, hi_it] = std::minmax_element(rec.points.begin(), rec.points.end(),
                                              [](const auto& a, const auto& b) { return a.x_tilde < b.x_tilde; });
    double lo = lo_it->x_tilde;
    double hi = hi_it->x_tilde;
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    std::vector<std::vector<std::size_t>> counts(n_labels, std::vector<std::size_t>(kBins, 0));
    for (const auto& p : rec.points) {
        auto bin = static_cast<std::size_t>((p.x_tilde - lo) / (hi - lo) * kBins);
        counts[p.label][std::min(bin, kBins - 1)]++;
    }
    std::size_t peak = 1;
    for (const auto& row : counts) peak = std::max(peak, *std::max_element(row.begin(), row.end()));

    const double bar = width / kBins;
    for (std::size_t label = 0; label < n_labels; ++label) {
        for (std::size_t b = 0; b < kBins; ++b) {
            if (counts[label][b] == 0) continue;
            const double h = height * static_cast<double>(counts[label][b]) / static_cast<double>(peak);
            out << "<rect x=\"" << num(left + bar * static_cast<double>(b)) << "\" y=\"" << num(bottom - h)
                << "\" width=\"" << num(bar) << "\" height=\"" << num(h) << "\" fill=\"" << colour(label)
                << "\" fill-opacity=\"0.45\"/>\n";
        }
    }
    out << "<text x=\"" << num(left) << "\" y=\"" << num(bottom + 16) << "\" font-size=\"11\">" << num(lo)
        << "</text>\n";
    out << "<text x=\"" << num(left + width) << "\" y=\"" << num(bottom + 16)
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(hi) << "</text>\n";
    out << "</g>\n";
}

}  // namespace

std::string render_bloch_svg(const TrajectoryRecord& record, const std::vector<std::string>& class_names) {
    std::size_t n_labels = class_names.size();
    for (const auto& p : record.points) n_labels = std::max(n_labels, p.label + 1);

    const double width = 3 * kPanel + 40;
    const double height = kTop + kPanel + 40;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"10\" y=\"18\" font-weight=\"bold\">epoch " << record.epoch << " (" << record.points.size()
        << " samples; hollow: before SU(2), filled: after SU(2))</text>\n";

    sphere_panel(out, 10, record, 0, 1, "view from +Q3", "Q1", "Q2");
    sphere_panel(out, 20 + kPanel, record, 0, 2, "view from -Q2", "Q1", "Q3");
    histogram_panel(out, 30 + 2 * kPanel, record, n_labels);

    double lx = 10;
    for (std::size_t label = 0; label < n_labels; ++label) {
        out << "<rect x=\"" << num(lx) << "\" y=\"" << num(height - 24) << "\" width=\"10\" height=\"10\" fill=\""
            << colour(label) << "\"/>\n";
        const std::string name = escape(class_name(class_names, label));
        out << "<text x=\"" << num(lx + 14) << "\" y=\"" << num(height - 15) << "\">" << name << "</text>\n";
        lx += 30 + 8 * static_cast<double>(name.size());
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace dqn
