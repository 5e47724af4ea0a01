#include "plot.hpp"

#include "ellipsoid_lab/errors.hpp"
#include "ellipsoid_lab/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

namespace ellipsoid_lab::cli {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 150.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 8> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

double scaled_m(const PhaseCell& c) {
    const double d = static_cast<double>(c.d);
    return static_cast<double>(c.m) / (d * d / 4.0);
}

std::map<std::size_t, std::vector<PhaseCell>> by_dimension(const PhaseTable& table) {
    std::map<std::size_t, std::vector<PhaseCell>> out;
    for (const auto& c : table.cells) {
        out[c.d].push_back(c);
    }
    for (auto& [d, cells] : out) {
        std::sort(cells.begin(), cells.end(), [](const PhaseCell& a, const PhaseCell& b) { return a.m < b.m; });
    }
    return out;
}

double x_max(const PhaseTable& table) {
    double hi = 1.25;
    for (const auto& c : table.cells) {
        hi = std::max(hi, scaled_m(c) * 1.05);
    }
    return hi;
}

}  // namespace

std::string render_phase_svg(const PhaseTable& table) {
    const double xmax = x_max(table);
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + x / xmax * plot_w; };
    auto py = [&](double y) { return kTop + (1.0 - y) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(xmax) << "\" y2=\"" << py(0)
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0) << "\" y2=\"" << py(1)
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double y = k / 4.0;
        svg << "<text x=\"" << px(0) - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << y << "</text>\n";
    }
    for (double x = 0.0; x <= xmax + 1e-9; x += 0.5) {
        svg << "<text x=\"" << px(x) << "\" y=\"" << py(0) + 18 << "\" text-anchor=\"middle\">" << x << "</text>\n";
    }
    svg << "<text x=\"" << px(xmax / 2) << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">m / (d^2/4)</text>\n";
    svg << "<text x=\"15\" y=\"" << py(0.5) << "\" transform=\"rotate(-90 15 " << py(0.5)
        << ")\" text-anchor=\"middle\">success rate</text>\n";
    svg << "<line x1=\"" << px(1.0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1.0) << "\" y2=\"" << py(1)
        << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";

    std::size_t series = 0;
    for (const auto& [d, cells] : by_dimension(table)) {
        const char* color = kColors[series % kColors.size()];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& c : cells) {
            svg << px(scaled_m(c)) << ',' << py(c.rate) << ' ';
        }
        svg << "\"/>\n";
        for (const auto& c : cells) {
            svg << "<circle cx=\"" << px(scaled_m(c)) << "\" cy=\"" << py(c.rate) << "\" r=\"3\" fill=\"" << color
                << "\"/>\n";
        }
        const double ly = kTop + 20.0 * static_cast<double>(series);
        svg << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 40
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << kWidth - kRight + 45 << "\" y=\"" << ly + 4 << "\">d = " << d << "</text>\n";
        ++series;
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string render_phase_sidecar(const PhaseTable& table) {
    nlohmann::json doc;
    doc["x_axis"] = "m / (d^2/4)";
    doc["y_axis"] = "success rate";
    doc["reference_line"] = 1.0;
    doc["series"] = nlohmann::json::array();
    for (const auto& [d, cells] : by_dimension(table)) {
        nlohmann::json s;
        s["d"] = d;
        s["label"] = "d = " + std::to_string(d);
        s["points"] = nlohmann::json::array();
        for (const auto& c : cells) {
            s["points"].push_back({{"m", c.m}, {"x", scaled_m(c)}, {"rate", c.rate}});
        }
        doc["series"].push_back(s);
    }
    return doc.dump(2) + "\n";
}

void plot_summary(const std::string& summary_path, const std::string& image_path) {
    std::ifstream in(summary_path);
    if (!in) {
        throw IoError("cannot read summary '" + summary_path + "'");
    }
    const PhaseTable table = read_summary_csv(in);
    if (table.cells.empty()) {
        throw IoError("summary '" + summary_path + "' has no data rows");
    }
    std::ofstream image(image_path, std::ios::binary | std::ios::trunc);
    std::ofstream sidecar(image_path + ".json", std::ios::binary | std::ios::trunc);
    if (!image || !sidecar) {
        throw IoError("cannot write plot to '" + image_path + "'");
    }
    image << render_phase_svg(table);
    sidecar << render_phase_sidecar(table);
}

}  // namespace ellipsoid_lab::cli
