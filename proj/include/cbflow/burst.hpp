#pragma once

#include "cbflow/cb_builder.hpp"
#include "cbflow/noose.hpp"
#include "cbflow/verify.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace cbflow {

struct PhaseThresholds {
    double burst = 0.0;      // 0 => 1/rc
    double recovery = 10.0;  // empirical ceiling, reported not asserted sharp
};

struct PhaseDecomposition {
    // maximal interval of recorded times with sup K >= the burst threshold
    double burst_start = -1.0;
    double burst_end = -1.0;
    bool burst_detected = false;
    // first recorded t after the burst with sup K <= the recovery threshold
    double recovery_time = -1.0;
    double peak_K = 0.0;
    double peak_time = 0.0;
    int threshold_crossings = 0;  // > 2 means the phase boundary oscillates
    bool ambiguous = false;
};

PhaseDecomposition detect_phases(const FlowSeries& fs, double rc,
                                 const PhaseThresholds& thresholds = {});

struct ScenarioConfig {
    GridSpec grid;
    SolverConfig solver;
    NooseConfig noose;
    PhaseThresholds thresholds;
    bool run_noose = true;
    bool run_checks = true;
};

struct BurstReport {
    double rc = 0.0;
    double lc = 0.0;
    CBParams params;
    double t1 = -1.0;
    PhaseDecomposition phases;
    CurvatureEnvelope envelope;            // pre-collapse 1/(2(1-t)) ceiling
    std::vector<CheckReport> checks;       // harness results
    double extinction_time = -1.0;
    double predicted_T = 0.0;
    bool extinct = false;
    bool solver_complete = true;

    bool checks_pass() const;
    bool pass() const;  // template: burst present, early ceiling, checks green
};

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Full pipeline: build (aborting on a failed surface property report), flow to
// the horizon with the coupled noose, harness checks, phase detection. The
// produced series is returned through *series_out when non-null.
BurstReport run_cb_scenario(double rc, double lc, double horizon,
                            const ScenarioConfig& cfg, FlowSeries* series_out = nullptr);

struct SweepRow {
    double rc = 0.0;
    double lc = 0.0;
    bool ok = false;
    std::string error;
    BurstReport report;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double exponent = 0.0;  // least-squares slope of log(peak K) vs log(1/rc)
    bool exponent_valid = false;
};

// One scenario per rc with lc = 1/(8 rc); per-run failures are recorded and
// the sweep continues. jobs > 1 runs scenarios concurrently.
SweepResult sweep_rc(const std::vector<double>& rc_list, double horizon,
                     const ScenarioConfig& cfg, int jobs = 1);

}  // namespace cbflow
