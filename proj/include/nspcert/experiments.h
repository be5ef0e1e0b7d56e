#ifndef NSPCERT_EXPERIMENTS_H_
#define NSPCERT_EXPERIMENTS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nspcert/report.h"

namespace nspcert {

struct ExperimentConfig {
  Ensemble ensemble = Ensemble::kGaussian;
  int n = 40;
  std::vector<double> rhos = {0.5};
  std::vector<int> ks = {1};
  int samples = 10;
  std::uint64_t base_seed = 1;  // sample i uses matrix seed base_seed + i
  BoundOptions bound;
  int threads = 1;
  std::string out_dir = ".";

  void Validate() const;
  // round(rho n), the row count of every matrix in the rho cell.
  int RowsFor(double rho) const;
};

// One (matrix, k) job of a table sweep.
struct CellResult {
  double rho = 0.0;
  int m = 0;
  int sample = 0;
  std::uint64_t seed = 0;
  int k = 0;
  bool ok = false;
  std::string error;
  double alpha_upper = 1.0;
  std::optional<double> alpha_lower;          // randomized, both rules
  std::optional<double> alpha_lower_theorem;  // randomized, fixed scaling
  std::optional<double> alpha_lower_direct;
  std::optional<double> relaxation_lower;
  std::optional<TightnessReport> tightness;
  int iterations = 0;
};

struct TableRow {
  int k = 0;
  int samples_ok = 0;
  int samples_failed = 0;
  double median_upper = 0.0;
  double min_upper = 0.0;
  double max_upper = 0.0;
  std::optional<double> median_lower;
  std::optional<double> median_direct;
  bool certified = false;  // median upper bound < 1/2
};

struct TablesResult {
  std::vector<CellResult> cells;  // sorted by (rho, k, sample)
  // Rows per rho, in the order of cfg.rhos; each sorted by k.
  std::vector<std::pair<double, std::vector<TableRow>>> tables;
};

// Runs every (rho, sample, k) job on a pool of cfg.threads workers. A failing
// job is recorded in its cell and the sweep continues.
TablesResult RunTables(const ExperimentConfig& cfg);

std::vector<TableRow> Summarize(const std::vector<CellResult>& cells,
                                double rho);

void WriteTableCsv(std::ostream& out, const std::vector<TableRow>& rows);
void WriteCellsCsv(std::ostream& out, const std::vector<CellResult>& cells);

// Writes table_<ensemble>_rho<rho>.csv for each rho and cells_<ensemble>.csv
// into cfg.out_dir; returns the paths written.
std::vector<std::string> WriteTables(const ExperimentConfig& cfg,
                                     const TablesResult& result);

struct RecoverConfig {
  ProblemInstance instance;
  int k_min = 1;
  int k_max = 1;
  int trials = 50;
  std::uint64_t seed = 1;
  BoundOptions bound;

  void Validate() const;
};

struct RecoverRow {
  int k = 0;
  int trials = 0;
  double recovery_prob = 0.0;
  double mean_l1_error = 0.0;
  int decoder_failures = 0;
  std::optional<double> alpha_upper;
  bool certified = false;
  std::optional<double> error_constant;
  std::optional<double> bound;  // error_constant * mean sigma_k(x0)
};

struct RecoverResult {
  std::vector<RecoverRow> rows;
  std::optional<int> strong_threshold;  // largest k with certified alpha < 1/2
};

// For each k draws `trials` signals with a uniformly random size-k support
// and i.i.d. uniform(-1, 1) nonzeros (stream 5 of `seed`) and decodes them.
// Upper bounds are computed while they certify; after the first k that does
// not certify, larger k are decoded but not bounded.
RecoverResult RunRecover(const RecoverConfig& cfg);

void WriteRecoverCsv(std::ostream& out, const RecoverResult& result);

struct TightnessSummary {
  Histogram k1;
  Histogram k_more;
  int used_k1 = 0;
  int used_k_more = 0;
  int skipped = 0;  // rows without a Gamma (no mu)
  std::optional<double> iqr_k1;
  std::optional<double> iqr_k_more;
};

// Reads cells CSVs written by WriteCellsCsv and bins log10(mu). With no
// usable rows both histograms are empty.
TightnessSummary RunTightness(const std::vector<std::string>& cell_files,
                              int bins);

void WriteTightnessCsv(std::ostream& out, const TightnessSummary& summary);

// Builds the orthoprojector point for a Gaussian m x 2m matrix and checks it
// against both relaxations.
nlohmann::json RunCounterexample(int m, std::uint64_t seed);

double Median(std::vector<double> values);
// Interquartile range with linear interpolation between order statistics.
double InterquartileRange(std::vector<double> values);

}  // namespace nspcert

#endif  // NSPCERT_EXPERIMENTS_H_
