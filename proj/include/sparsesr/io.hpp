#ifndef SPARSESR_IO_HPP
#define SPARSESR_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sparsesr/model.hpp"

namespace sparsesr {

struct IterationRecord;
struct SweepRow;
struct SpectralCloud;
struct PatternResult;
struct SolveResult;

/// 17 significant digits, locale independent.
std::string format_number(double v);

/// Problem document: a JSON object with dense matrices "A", "B", "C" and an
/// optional 0/1 pattern "S" (all ones when omitted), each an array of rows.
/// Errors carry `source:line:column`.
ProblemInstance parse_problem(const std::string& text, const std::string& source = "<input>");
ProblemInstance load_problem(const std::filesystem::path& path);
std::string problem_to_json(const ProblemInstance& inst);

/// A perturbation document: either {"Delta": [[...], ...]} or a bare array of rows.
RealMatrix parse_delta(const std::string& text, const std::string& source = "<input>");
RealMatrix load_delta(const std::filesystem::path& path);
std::string delta_to_json(const RealMatrix& delta);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

using KeyValues = std::vector<std::pair<std::string, std::string>>;
void write_key_values(std::ostream& os, const KeyValues& kv);

/// iter,cost,grad_norm,omega,alpha,beta,delta_fnorm
void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace);
/// re,im,delta_fnorm
void write_cloud_csv(std::ostream& os, const SpectralCloud& cloud);
/// w,fnorm,omega,E (plus cost and status)
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
/// pattern_entries,sr,omega_hat,perturbation_entries,tie_group
void write_ranking_csv(std::ostream& os, const std::vector<PatternResult>& ranking);
/// One row per distinct stationary point.
void write_results_csv(std::ostream& os, const std::vector<SolveResult>& results);

/// Entries as 1-based "(i,j)" joined by ';'.
std::string format_entries(const std::vector<Entry>& entries);

}  // namespace sparsesr

#endif  // SPARSESR_IO_HPP
