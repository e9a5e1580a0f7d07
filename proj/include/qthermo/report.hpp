#pragma once

#include <cstdint>
#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qthermo/error_lab.hpp"
#include "qthermo/pipeline.hpp"
#include "qthermo/pulse.hpp"
#include "qthermo/thermometry.hpp"

namespace qthermo {

nlohmann::json slope_json(const SlopeEstimate &s);
/// T_A_mK, T_B_mK, T_C_mK, slopes, intervals, consistency, window and seed.
nlohmann::json estimate_json(const EstimateReport &rep, const ReadoutConfig &readout, std::uint64_t seed);
nlohmann::json calibration_json(const std::vector<CalibrationReport> &reports, const PulseSet &pulses);
nlohmann::json stats_json(const RepeatedStats &stats);
nlohmann::json bias_json(const MonteCarloReport &report);
/// Populations before and after each sequence, with the ideal prediction.
nlohmann::json populations_json(const SimulationResult &r);

struct SweepRow {
    double control = 0.0;
    bool ok = false;
    std::array<double, 3> t_mk{0.0, 0.0, 0.0};
    std::array<std::pair<double, double>, 3> ci{};
    double consistency = 0.0;
    std::string error;
};

void write_sweep_csv(std::ostream &os, const std::string &control_name, const std::vector<SweepRow> &rows);

void write_text_file(const std::string &path, const std::string &text);

}  // namespace qthermo
