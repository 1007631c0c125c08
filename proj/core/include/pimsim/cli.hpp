// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: flag parsing and validation, sweep execution, CSV
// emission, and gap reporting. Exit codes: 0 when all requested points
// completed, 2 for usage errors, 3 for runtime refusals (hypothesis budget,
// unwritable output).

#pragma once

#include <iosfwd>
#include <string>

#include "pimsim/harness.hpp"

namespace pimsim {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HelpRequested {
    std::string text;
};

/// Default worker count comes from PIMSIM_WORKERS, then the hardware.
inline constexpr const char* kWorkersEnvVar = "PIMSIM_WORKERS";

struct RunSpec {
    std::vector<SchemeConfig> configs;  // one, or three when a preset expands
    std::string preset;                 // "", "fig5", "fig6", "fig7"
    double snr_start = 0.0;
    double snr_stop = 20.0;
    double snr_step = 2.0;
    StopRule stop;
    std::uint64_t seed = 1;
    int workers = 1;
    double gap_level = 1e-2;
    bool csv_elapsed_zero = false;  // print 0 in the elapsed_s column (reproducible bytes)
    std::string out = "-";

    std::vector<double> snr_list() const;

    /// Equality covers everything that defines the simulation output.
    /// workers (counts are worker-independent by contract) and the output
    /// path are execution detail: they stay out of equality and out of the
    /// CSV echo, so identical runs produce identical bytes anywhere.
    bool operator==(const RunSpec& o) const {
        return configs == o.configs && preset == o.preset && snr_start == o.snr_start && snr_stop == o.snr_stop &&
               snr_step == o.snr_step && stop == o.stop && seed == o.seed && gap_level == o.gap_level &&
               csv_elapsed_zero == o.csv_elapsed_zero;
    }
};

/// Parse flags (program name excluded). Throws UsageError on unknown flags
/// or invalid combinations, HelpRequested for --help.
RunSpec parse_args(const std::vector<std::string>& args);

/// Canonical flag string; parse_args(split(canonical_args(s))) == s.
std::string canonical_args(const RunSpec& spec);

/// Whitespace split for re-parsing a canonical echo.
std::vector<std::string> split_args(const std::string& line);

/// CSV: one comment line echoing the spec, one header row, one row per point
/// per curve. Bytes are deterministic for fixed inputs.
void emit_csv(const RunSpec& spec, const std::vector<BerCurve>& curves, std::ostream& os);
void emit_csv(const RunSpec& spec, const std::vector<BerCurve>& curves, const std::string& path);

/// Pairwise gaps at a BER level for every curve pair; pairs outside their
/// sweep range are marked explicitly.
std::string report_gaps(const std::vector<BerCurve>& curves, double ber_level);

std::string curve_label(const SchemeConfig& cfg);

int cli_main(int argc, char** argv);

}  // namespace pimsim
