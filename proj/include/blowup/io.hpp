#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "blowup/branching.hpp"
#include "blowup/oscillation.hpp"
#include "blowup/patterns.hpp"
#include "blowup/profile.hpp"
#include "blowup/spectral.hpp"

namespace blowup::io {

namespace fs = std::filesystem;

/// Columns of equal length written as CSV with %.17g numbers and LF endings.
void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};
CsvTable read_csv(const fs::path& path);

/// Sidecar path: same stem, .json extension.
fs::path sidecar_path(const fs::path& csv);

/// CSV `y,F` plus sidecar JSON with params, bc, normalization, solver
/// tolerance, residual_norm and mesh descriptor.
void write_profile(const Profile& profile, const fs::path& csv, double tol = 1e-6);

/// Inverse of write_profile. residual_norm is recomputed from the values;
/// converged means the recomputed residual is within the stored tolerance.
Profile read_profile(const fs::path& csv);

void write_kernel(const KernelTable& table, const fs::path& csv);
/// Long format `l,k,pairing`.
void write_pairings(const std::vector<std::vector<double>>& matrix, const fs::path& csv);
void write_trajectory(const std::vector<OscState>& samples, const fs::path& csv);

/// Curve CSV `p,sup_norm,residual,converged`.
void write_branch_curve(const Branch& branch, const fs::path& csv);
/// Branch manifest JSON: label, n, direction, schedule, records with file references.
void write_branch_manifest(const Branch& branch, BranchEnd end, const fs::path& json);

void write_classification(const MultiIndex& index, int transversal, const fs::path& json);

}  // namespace blowup::io
