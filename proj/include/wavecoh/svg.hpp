#pragma once

#include <string>

#include "wavecoh/pipeline.hpp"

namespace wavecoh {

/// Coherence heatmap: r2 colormap, shaded cone of influence, thick black
/// significance contours and phase arrows. Arrows appear only in significant,
/// reliable cells, at most one per arrow_spacing square. The r2 grid is
/// embedded verbatim as CSV in <metadata id="wavecoh-r2">.
std::string render_svg(const ResultBundle& bundle, const RenderOptions& options);

/// Wavelet power heatmap (log10 |W|^2, four decades) with the cone of influence.
std::string render_power_svg(const TransformBundle& bundle, const RenderOptions& options);

}  // namespace wavecoh
