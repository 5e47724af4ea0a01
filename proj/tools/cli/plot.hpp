#pragma once

#include "ellipsoid_lab/experiment.hpp"

#include <string>

namespace ellipsoid_lab::cli {

/// Renders success rate against m / (d^2/4), one polyline per d, with a
/// dashed reference line at 1.0, as an SVG document.
std::string render_phase_svg(const PhaseTable& table);

/// Machine-readable description of what render_phase_svg drew.
std::string render_phase_sidecar(const PhaseTable& table);

/// Reads the summary CSV at `summary_path`, writes the SVG to `image_path`
/// and the sidecar to `image_path + ".json"`. Throws IoError on malformed
/// or empty input.
void plot_summary(const std::string& summary_path, const std::string& image_path);

}  // namespace ellipsoid_lab::cli
