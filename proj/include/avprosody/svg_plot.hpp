#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "avprosody/pipeline.hpp"

namespace avprosody {

/// Stacked panels sharing a time axis: F0 (blue) and intensity (green) when
/// the result carries contours, then head pitch, then eyebrow raise. The
/// primary result is drawn dashed, overlays solid and labeled by strength.
std::string render_session_svg(const AnalysisResult& result, const std::vector<AnalysisResult>& overlays = {});

void plot_session(const AnalysisResult& result, const std::vector<AnalysisResult>& overlays,
                  const std::filesystem::path& path);

}  // namespace avprosody
