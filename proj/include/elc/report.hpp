#pragma once

// Config parsing, the analyze / orbits / chi pipelines and their reports.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "elc/symmetry_analysis.hpp"

namespace elc {

inline constexpr const char* kReportSchema = "elc-report/1";

enum ExitCode : int { kCertified = 0, kInputError = 1, kHypothesisFailure = 2, kSolverFailure = 3 };

struct Tolerances {
    double invariance = 1e-10;
    double zero_cutoff = 1e-8;
    double cluster_gap = 1e-7;
    double critical = 1e-9;
    double integrator = 1e-12;
    double defect = 1e-10;
    double residual = 1e-8;
    double period = 1e-3;  // |T - 2 pi lambda*| allowed at the smallest amplitude
};

struct RunConfig {
    int dimension = 0;
    std::string potential;
    std::vector<Eigen::MatrixXd> generators;
    Eigen::VectorXd q0;
    std::optional<std::size_t> j0;  // nullopt = auto
    std::vector<double> amplitudes;
    Branch branch = Branch::Nondegenerate;
    std::uint64_t seed = 0;
    std::optional<std::vector<Weight>> isotropy_basis;
    Tolerances tol;
    int invariance_samples = 200;
    double invariance_box = 2.0;
    double probe_radius = 0.3;
    int probe_samples = 10000;
    std::optional<int> modes;  // Fourier cutoff N; default n0 + 5
    std::string report_path;
    std::string branch_csv_path;
    std::string blocks_csv_path;
};

/// Validates the document; errors name the offending field as a JSON pointer.
RunConfig parse_config(const nlohmann::json& doc);

struct RunResult {
    nlohmann::json report;
    int exit_code = kCertified;
    std::string branch_csv;  // empty unless orbits were requested
    std::string blocks_csv;  // empty unless blocks were requested
};

RunResult run_analyze(const RunConfig& config, bool dump_blocks = false);
RunResult run_orbits(const RunConfig& config, bool dump_blocks = false);

/// Text report for one or more signatures over T^rank: frak_S, the truncated
/// chi and a pairwise distinguishability table.
std::string run_chi(const std::vector<std::string>& signatures, int rank);

/// Signature of the whole representation R^n given by the generators.
ReprSignature signature_of(const SkewGeneratorSet& gens);

/// Report serialization without the timestamp, for determinism checks.
std::string canonical_dump(nlohmann::json report);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);

nlohmann::json error_object(const std::string& code, const std::string& message);

}  // namespace elc
