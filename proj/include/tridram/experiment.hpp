#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tridram/dram_model.hpp"

namespace tridram {

enum class Scheme { RowMajor, Optimized };

const char* scheme_name(Scheme s);

struct ExperimentSpec {
    std::vector<std::string> presets;      // resolved names
    std::vector<Scheme> schemes;
    uint32_t n = 2000;
    bool refresh = true;
    uint32_t lookahead = 32;
    std::string out_dir;                   // empty = no files
    std::string preset_dir;                // empty = default search
};

struct CellResult {
    std::string config;
    Scheme scheme;
    Phase phase;
    PhaseStats stats;
    double util = 0.0;
};

struct MatrixResult {
    std::vector<CellResult> cells;  // preset-major, scheme, then write/read

    const CellResult* find(const std::string& config, Scheme s, Phase p) const;
    /// min(write, read) for one (config, scheme) row; the throughput limit.
    std::optional<double> row_minimum(const std::string& config, Scheme s) const;
};

/// Runs every (preset, scheme) pair: derive parameters, generate both access
/// streams, map, and simulate both phases. Cells run concurrently; the
/// result order is fixed.
MatrixResult run_matrix(const ExperimentSpec& spec);

/// The published bandwidth utilizations being reproduced, in percent.
struct ReferenceRow {
    std::string config;
    double row_major_write, row_major_read;
    double optimized_write, optimized_read;
};

using ReferenceTable = std::vector<ReferenceRow>;

const ReferenceTable& reference_table();

struct CellComparison {
    std::string config;
    Scheme scheme;
    Phase phase;
    double simulated_pct;
    double reference_pct;
    double diff_pp;
    bool pass;
};

struct RankCheck {
    std::string standard;
    std::string faster, slower;
    double faster_pct, slower_pct;
    bool pass;
};

struct ComparisonReport {
    std::vector<CellComparison> cells;
    std::vector<RankCheck> ranks;
    double tolerance_pp;
    bool all_pass = false;
};

/// Absolute per-cell differences in percentage points against the reference,
/// plus the rank-order check: within one standard, the faster speed grade
/// must show the lower row-major read utilization.
ComparisonReport compare_to_reference(const MatrixResult& results, const ReferenceTable& ref,
                                      double tolerance_pp);

/// results.csv (one data row per simulated phase) and table.txt (the
/// reference-table layout with per-row minima marked). Returns the paths.
std::vector<std::string> emit_reports(const MatrixResult& results, const std::string& out_dir);

/// CSV content only, for byte-identical determinism checks.
std::string render_results_csv(const MatrixResult& results);
std::string render_table(const MatrixResult& results);

/// Loads a results.csv produced by emit_reports.
MatrixResult load_results_csv(const std::string& path);

} // namespace tridram
