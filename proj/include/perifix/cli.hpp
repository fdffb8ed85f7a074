#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "perifix/integrate.hpp"
#include "perifix/report.hpp"

namespace perifix::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kModelInvalid = 2,
    kCheckFailed = 3,
    kNumerical = 4,
};

// perifix <simulate|orbit|certify|reproduce-paper> [flags]. args excludes the
// program name. Diagnostics go to err; stdout-directed output to out.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// The gene example as a model document (the "gene" variant).
std::string reference_model_document();

struct ReproduceOptions {
    std::filesystem::path outdir;
    IntegratorSettings solver;  // max_step is replaced by tau/100 when infinite
    double t_end = 200.0;
    double dt = 0.05;
    std::uint64_t seed = 0;
};

struct ReproduceResult {
    RunReport report;
    double max_pairwise_distance = 0.0;  // at t = 5j, j >= 40
    double max_period_defect = 0.0;      // |x(t+5) - x(t)| on [150, 195]
    double certificate_orbit_distance = 0.0;  // r's orbit vs the trajectories at t = 5j, j >= 40
    bool passed = false;
};

// Writes fig2..fig5 CSV + gnuplot scripts, model.json, certificate.json and
// report.json into outdir. Throws std::runtime_error on I/O failure.
ReproduceResult reproduce_paper(const ReproduceOptions& opts);

}  // namespace perifix::cli
