#pragma once

#include <array>
#include <iosfwd>

#include "cropspray/geodesy.hpp"

namespace cropspray::mission {

/// Surveyed RTK checkpoint: ground-truth ECEF position and the coordinates
/// the rover reported there.
struct SurveyPoint {
    geodesy::EcefCoord actual;
    geodesy::EcefCoord observed;
};

/// The two embedded field checkpoints used to validate RTK accuracy.
const std::array<SurveyPoint, 2>& rtk_survey_points();

/// Per-point accuracy against the embedded reference bands. The headline
/// metric is the horizontal error, the 2-norm over the first two ECEF
/// components (the convention the reference errors were quoted in); the full
/// 3-D norms are carried alongside for transparency.
struct SurveyReport {
    std::array<double, 2> horizontal_error_m{};
    double mean_horizontal_error_m = 0.0;
    std::array<double, 2> full_error_m{};
    std::array<double, 2> reference_error_m{};  // expected horizontal errors
    double reference_mean_m = 0.0;
    double tolerance_m = 0.0;
    bool within_reference = false;
};

SurveyReport evaluate_rtk_survey();

/// Human-readable printout, one line per checkpoint plus the mean.
void print_survey_report(const SurveyReport& report, std::ostream& out);

}  // namespace cropspray::mission
