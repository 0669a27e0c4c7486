#include "cropspray/survey.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace cropspray::mission {

namespace {

// Expected horizontal errors at the two checkpoints, and the band half-width
// the check runs at.
constexpr std::array<double, 2> kReferenceErrorM = {0.032, 0.058};
constexpr double kReferenceMeanM = 0.045;
constexpr double kToleranceM = 0.001;

}  // namespace

const std::array<SurveyPoint, 2>& rtk_survey_points() {
    static const std::array<SurveyPoint, 2> points = {{
        {{1110825.867, 6235329.584, 750012.164}, {1110825.87085, 6235329.55216, 750012.098407}},
        {{1110706.361, 6235347.832, 750033.936}, {1110706.36502, 6235347.89016, 750033.982406}},
    }};
    return points;
}

SurveyReport evaluate_rtk_survey() {
    SurveyReport report;
    report.reference_error_m = kReferenceErrorM;
    report.reference_mean_m = kReferenceMeanM;
    report.tolerance_m = kToleranceM;

    const auto& points = rtk_survey_points();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double dx = points[i].observed.x_m - points[i].actual.x_m;
        const double dy = points[i].observed.y_m - points[i].actual.y_m;
        const double dz = points[i].observed.z_m - points[i].actual.z_m;
        report.horizontal_error_m[i] = std::hypot(dx, dy);
        report.full_error_m[i] = std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    report.mean_horizontal_error_m =
        0.5 * (report.horizontal_error_m[0] + report.horizontal_error_m[1]);

    report.within_reference =
        std::abs(report.horizontal_error_m[0] - kReferenceErrorM[0]) <= kToleranceM &&
        std::abs(report.horizontal_error_m[1] - kReferenceErrorM[1]) <= kToleranceM &&
        std::abs(report.mean_horizontal_error_m - kReferenceMeanM) <= kToleranceM;
    return report;
}

void print_survey_report(const SurveyReport& report, std::ostream& out) {
    out << std::fixed << std::setprecision(2);
    for (std::size_t i = 0; i < report.horizontal_error_m.size(); ++i) {
        out << "point " << (i + 1) << ": horizontal error " << 100.0 * report.horizontal_error_m[i]
            << " cm (expected " << 100.0 * report.reference_error_m[i] << " cm), 3-D error "
            << 100.0 * report.full_error_m[i] << " cm\n";
    }
    out << "mean horizontal error " << 100.0 * report.mean_horizontal_error_m << " cm (expected "
        << 100.0 * report.reference_mean_m << " cm)\n";
    out << (report.within_reference ? "within" : "OUTSIDE") << " +-"
        << 100.0 * report.tolerance_m << " cm of the reference errors\n";
    out.unsetf(std::ios::fixed);
}

}  // namespace cropspray::mission
