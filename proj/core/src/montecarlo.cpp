#include "cropspray/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace cropspray::mission {

namespace {

RunSummary summarize(std::size_t index, std::uint64_t seed, const RunResult& result) {
    RunSummary s;
    s.run_index = index;
    s.seed = seed;
    s.completed = result.report.completed;
    s.timeout = result.report.timeout;
    s.cross_track_mean_m = result.report.cross_track_mean_m;
    s.cross_track_variance_m2 = result.report.cross_track_variance_m2;
    s.cross_track_max_m = result.report.cross_track_max_m;
    s.nees_mean = result.nees_mean;
    s.nees_final = result.nees_final;
    s.gps_rejected = result.report.gps_rejected;
    for (const auto& p : result.report.plants) {
        if (p.sprayed) {
            ++s.plants_sprayed;
        }
    }
    return s;
}

}  // namespace

MonteCarloReport run_monte_carlo(const MissionConfig& base, std::size_t runs,
                                 unsigned parallel) {
    if (runs == 0) {
        throw std::invalid_argument("run_monte_carlo: need at least one run");
    }
    MonteCarloReport report;
    report.runs = runs;
    report.base_seed = base.seed;
    report.summaries.resize(runs);

    unsigned workers = parallel == 0 ? std::thread::hardware_concurrency() : parallel;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(runs)));

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t i = next.fetch_add(1); i < runs; i = next.fetch_add(1)) {
            MissionConfig cfg = base;
            cfg.seed = base.seed + i;
            RunSummary& out = report.summaries[i];
            try {
                out = summarize(i, cfg.seed, run_mission(cfg));
            } catch (const std::exception& e) {
                out.run_index = i;
                out.seed = cfg.seed;
                out.failed = true;
                out.error = e.what();
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    // Aggregation in run order; independent of scheduling.
    double cte_sum = 0.0;
    double var_sum = 0.0;
    double nees_sum = 0.0;
    double cte_min = std::numeric_limits<double>::infinity();
    double cte_max = -std::numeric_limits<double>::infinity();
    std::size_t ok = 0;
    for (const auto& s : report.summaries) {
        if (s.failed) {
            ++report.failures;
            continue;
        }
        ++ok;
        cte_sum += s.cross_track_mean_m;
        var_sum += s.cross_track_variance_m2;
        nees_sum += s.nees_final;
        cte_min = std::min(cte_min, s.cross_track_mean_m);
        cte_max = std::max(cte_max, s.cross_track_mean_m);
    }
    if (ok > 0) {
        report.cte_mean_avg = cte_sum / static_cast<double>(ok);
        report.cte_variance_avg = var_sum / static_cast<double>(ok);
        report.cte_mean_min = cte_min;
        report.cte_mean_max = cte_max;
        report.nees_final_avg = nees_sum / static_cast<double>(ok);
        report.nees_band = stats::mean_chi2_interval_95(ok, 3.0);
        report.nees_within_band = report.nees_final_avg >= report.nees_band.lo &&
                                  report.nees_final_avg <= report.nees_band.hi;
    }
    return report;
}

void write_monte_carlo_report(const MonteCarloReport& report, std::ostream& out) {
    using ordered_json = nlohmann::ordered_json;
    const ordered_json doc{
        {"runs", report.runs},
        {"failures", report.failures},
        {"base_seed", report.base_seed},
        {"cross_track", ordered_json{{"mean_of_means_m", report.cte_mean_avg},
                                     {"mean_min_m", report.cte_mean_min},
                                     {"mean_max_m", report.cte_mean_max},
                                     {"variance_avg_m2", report.cte_variance_avg}}},
        {"nees", ordered_json{{"final_avg", report.nees_final_avg},
                              {"band_lo", report.nees_band.lo},
                              {"band_hi", report.nees_band.hi},
                              {"within_band", report.nees_within_band}}}};
    out << doc.dump(2) << '\n';
}

void write_monte_carlo_csv(const MonteCarloReport& report, std::ostream& out) {
    out << "run,seed,failed,completed,timeout,cross_track_mean_m,cross_track_variance_m2,"
           "cross_track_max_m,nees_mean,nees_final,gps_rejected,plants_sprayed\n";
    nlohmann::ordered_json num;
    auto fmt = [&num](double v) {
        num = v;
        return num.dump();
    };
    for (const auto& s : report.summaries) {
        out << s.run_index << ',' << s.seed << ',' << (s.failed ? 1 : 0) << ','
            << (s.completed ? 1 : 0) << ',' << (s.timeout ? 1 : 0) << ','
            << fmt(s.cross_track_mean_m) << ',' << fmt(s.cross_track_variance_m2) << ','
            << fmt(s.cross_track_max_m) << ',' << fmt(s.nees_mean) << ',' << fmt(s.nees_final)
            << ',' << s.gps_rejected << ',' << s.plants_sprayed << '\n';
    }
}

}  // namespace cropspray::mission
