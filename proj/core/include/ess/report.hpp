#ifndef ESS_REPORT_HPP
#define ESS_REPORT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ess/engine.hpp"
#include "ess/game.hpp"

namespace ess {

enum class OutputFormat { Table, Json, Csv };

OutputFormat parse_output_format(const std::string& name);

/// Mean/95%-CI half-width/median for the total and first-hit runtimes of
/// a sweep.
struct RuntimeStats {
  double mean_total = 0.0, ci_total = 0.0, median_total = 0.0;
  double mean_first = 0.0, ci_first = 0.0, median_first = 0.0;
};

struct SweepAggregates {
  std::vector<long> ess_histogram;        // [i] = games with i certified ESS
  std::vector<long> support_size_counts;  // [s] = ESS with support size s
  ScreenCounts breakdown;
  RuntimeStats runtime;
  long games_with_ess = 0;
  long unresolved_games = 0;
};

struct SweepGame {
  int index = 0;
  uint64_t seed = 0;
  EssRun run;
};

struct SweepResult {
  int players = 3;
  int num_actions = 3;
  int count = 0;
  uint64_t master_seed = 0;
  SolverConfig config;
  std::vector<SweepGame> games;
};

SweepAggregates compute_aggregates(const SweepResult& sweep);

// --- persistence -------------------------------------------------------
std::string sweep_to_json(const SweepResult& sweep);
SweepResult sweep_from_json(const std::string& text);  // throws ParseError
void write_sweep(const SweepResult& sweep, const std::string& path);
SweepResult read_sweep(const std::string& path);

// --- single-game reports ------------------------------------------------
/// Deterministic report of one solved game. Timing lines only appear
/// with include_timing and are always last, so the deterministic section
/// is a prefix.
std::string format_solve_report(const SymmetricGame& game, const EssRun& run,
                                const DegeneracyReport* degeneracy,
                                OutputFormat format, bool include_timing);

// --- sweep tables --------------------------------------------------------
std::string format_runtime_table(std::span<const SweepResult> sweeps,
                                 OutputFormat format);
std::string format_histogram_table(std::span<const SweepResult> sweeps,
                                   OutputFormat format);
std::string format_support_size_table(std::span<const SweepResult> sweeps,
                                      OutputFormat format);
std::string format_breakdown_table(std::span<const SweepResult> sweeps,
                                   OutputFormat format);
std::string format_per_game_table(const SweepResult& sweep, OutputFormat format);

}  // namespace ess

#endif  // ESS_REPORT_HPP
