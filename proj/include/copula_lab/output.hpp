#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "copula_lab/experiments.hpp"

namespace copula_lab {

/// Shortest round-trip decimal form; "nan"/"inf"/"-inf" for non-finite values.
std::string format_number(double x);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

/// Header line plus rows, CRLF-free ("\n" line ends).
std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

/// Hex FNV-1a of the effective config with the output directory left out.
std::string config_hash(const nlohmann::json& effective_config);

/// Summary table; columns by study:
///   tau-retention: n,min,median,max
///   coverage studies: rho,n,coverage,se,median_area,repetitions,failures
///   mode-convergence: case,n,prob_d2_le_d1,se,mean_abs_diff,mean_abs_diff_se,median_abs_diff,repetitions,failures
///   regression-coverage: case,prior,n,coverage,median_area,se,repetitions,failures
std::string study_table_csv(const StudyResult& result);

/// Plot-ready long format: x,y,series,se,repetitions.
std::string study_long_csv(const StudyResult& result);

/// Writes table.csv, figure.csv, failures.log and manifest.json into dir (created if
/// needed) and returns the file names written.
std::vector<std::string> write_study_outputs(const StudyResult& result, const std::string& dir,
                                             const nlohmann::json& effective_config);

/// Writes `contents` to dir/name, creating dir.
void write_text_file(const std::string& dir, const std::string& name, const std::string& contents);

/// FAILED marker plus error.json in dir; existing outputs are left in place.
void write_failure_record(const std::string& dir, const std::string& command, const std::string& error_type,
                          const std::string& message);

}  // namespace copula_lab
