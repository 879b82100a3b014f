// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#include "sfot/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "sfot/errors.hpp"

namespace sfot {

namespace {

struct Rgb {
  double r, g, b;
};

// Fixed 7-stop ramp from dark blue through teal to yellow.
constexpr std::array<Rgb, 7> kRamp = {{{0.267, 0.005, 0.329},
                                       {0.283, 0.141, 0.458},
                                       {0.254, 0.265, 0.530},
                                       {0.164, 0.471, 0.558},
                                       {0.128, 0.567, 0.551},
                                       {0.478, 0.821, 0.318},
                                       {0.993, 0.906, 0.144}}};

std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double scaled = t * (kRamp.size() - 1);
  const int lo = std::min(static_cast<int>(scaled),
                          static_cast<int>(kRamp.size()) - 2);
  const double frac = scaled - lo;
  const auto mix = [&](double a, double b) { return a + frac * (b - a); };
  char buffer[8];
  std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x",
                static_cast<int>(std::lround(255 * mix(kRamp[lo].r, kRamp[lo + 1].r))),
                static_cast<int>(std::lround(255 * mix(kRamp[lo].g, kRamp[lo + 1].g))),
                static_cast<int>(std::lround(255 * mix(kRamp[lo].b, kRamp[lo + 1].b))));
  return buffer;
}

std::string fmt(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

std::ofstream open_svg(const std::filesystem::path& path, int width,
                       int height) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  return out;
}

}  // namespace

void render_field_svg(const std::filesystem::path& path,
                      const PlaneWaveDictionary& dict,
                      const CoefficientVector& coeffs, const Region& region,
                      int resolution) {
  const Eigen::MatrixXcd field =
      field_grid(dict, coeffs, region, resolution, resolution);
  const Eigen::MatrixXd magnitude = field.cwiseAbs();
  const double lo = magnitude.minCoeff();
  const double hi = magnitude.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;

  const int cell = 4;
  const int plot = resolution * cell;
  const int margin = 24;
  auto out = open_svg(path, plot + 2 * margin, plot + 2 * margin + 16);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      // y axis points up: row j = 0 is the bottom of the region
      const double t = (magnitude(i, j) - lo) / span;
      out << "<rect x=\"" << margin + i * cell << "\" y=\""
          << margin + (resolution - 1 - j) * cell << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"" << ramp_color(t)
          << "\"/>\n";
    }
  }
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << plot
      << "\" height=\"" << plot
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"" << margin + plot + 14
      << "\" font-family=\"monospace\" font-size=\"11\">|p| min " << fmt(lo)
      << "  max " << fmt(hi) << "</text>\n";
  out << "</svg>\n";
}

void render_coefficients_svg(const std::filesystem::path& path,
                             const PlaneWaveDictionary& dict,
                             const CoefficientVector& coeffs) {
  const int L = dict.size();
  const Eigen::VectorXd magnitude = coeffs.values.cwiseAbs();
  const double peak = std::max(magnitude.maxCoeff(), 1e-12);

  const int width = 480, height = 240, margin = 32;
  const double plot_w = width - 2.0 * margin;
  const double plot_h = height - 2.0 * margin;
  auto out = open_svg(path, width, height);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin + plot_h << "\" x2=\""
      << margin + plot_w << "\" y2=\"" << margin + plot_h
      << "\" stroke=\"black\"/>\n";
  for (int l = 0; l < L; ++l) {
    const double x =
        margin + plot_w * (dict.directions_rad[l] + std::numbers::pi) /
                     (2.0 * std::numbers::pi);
    const double y = margin + plot_h * (1.0 - magnitude[l] / peak);
    out << "<line x1=\"" << fmt(x) << "\" y1=\"" << margin + plot_h
        << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"#1f5fa8\" stroke-width=\"2\"/>\n";
    out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
        << "\" r=\"2.5\" fill=\"#1f5fa8\"/>\n";
  }
  out << "<text x=\"" << margin << "\" y=\"" << margin - 8
      << "\" font-family=\"monospace\" font-size=\"11\">|alpha| peak "
      << fmt(peak) << "</text>\n";
  out << "<text x=\"" << margin << "\" y=\"" << height - 6
      << "\" font-family=\"monospace\" font-size=\"11\">direction -pi .. pi"
      << "</text>\n";
  out << "</svg>\n";
}

}  // namespace sfot
