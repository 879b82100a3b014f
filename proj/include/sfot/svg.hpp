// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#pragma once

#include <filesystem>

#include "sfot/model.hpp"

namespace sfot {

/// Field-magnitude heatmap over the region as an SVG cell grid with min/max
/// annotations. Rendering is deterministic; the ramp interpolates linearly
/// through a fixed dark-blue -> teal -> yellow table.
void render_field_svg(const std::filesystem::path& path,
                      const PlaneWaveDictionary& dict,
                      const CoefficientVector& coeffs, const Region& region,
                      int resolution);

/// Stem plot of coefficient magnitudes against dictionary direction.
void render_coefficients_svg(const std::filesystem::path& path,
                             const PlaneWaveDictionary& dict,
                             const CoefficientVector& coeffs);

}  // namespace sfot
