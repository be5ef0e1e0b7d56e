#include "nspcert/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "nspcert/rng.h"

namespace nspcert {

namespace {

std::string Num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string Num(const std::optional<double>& v) { return v ? Num(*v) : ""; }

std::string RhoTag(double rho) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", rho);
  return buf;
}

// Quantile of sorted values, linear interpolation.
double Quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

double Median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "median of nothing");
  std::sort(values.begin(), values.end());
  return Quantile(values, 0.5);
}

double InterquartileRange(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "IQR of nothing");
  std::sort(values.begin(), values.end());
  return Quantile(values, 0.75) - Quantile(values, 0.25);
}

void ExperimentConfig::Validate() const {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "n must be >= 2");
  if (rhos.empty() || ks.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "rho and k lists must be nonempty");
  }
  if (samples < 1) throw Error(ErrorCode::kInvalidArgument, "samples must be >= 1");
  if (threads < 1) throw Error(ErrorCode::kInvalidArgument, "threads must be >= 1");
  if (ensemble == Ensemble::kFile) {
    throw Error(ErrorCode::kInvalidArgument, "sweeps need a random ensemble");
  }
  for (double rho : rhos) {
    const int m = RowsFor(rho);
    if (!(rho > 0) || m < 1 || m >= n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rho " + Num(rho) + " gives m outside [1, n)");
    }
  }
  for (int k : ks) {
    if (k < 1 || k > n) throw Error(ErrorCode::kInvalidArgument, "k out of range");
  }
}

int ExperimentConfig::RowsFor(double rho) const {
  return static_cast<int>(std::lround(rho * n));
}

TablesResult RunTables(const ExperimentConfig& cfg) {
  cfg.Validate();
  std::vector<CellResult> jobs;
  for (double rho : cfg.rhos) {
    for (int k : cfg.ks) {
      for (int s = 0; s < cfg.samples; ++s) {
        CellResult c;
        c.rho = rho;
        c.m = cfg.RowsFor(rho);
        c.sample = s;
        c.seed = cfg.base_seed + static_cast<std::uint64_t>(s);
        c.k = k;
        jobs.push_back(c);
      }
    }
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      CellResult& c = jobs[i];
      try {
        const ProblemInstance inst = Generate(cfg.ensemble, c.m, cfg.n, c.seed);
        const BoundReport r = ComputeBoundReport(inst, c.k, cfg.bound);
        c.alpha_upper = r.alpha_upper;
        c.alpha_lower = r.alpha_lower_randomized;
        c.alpha_lower_theorem = r.alpha_lower_randomized_theorem;
        c.alpha_lower_direct = r.alpha_lower_direct;
        c.relaxation_lower = r.relaxation_lower;
        c.tightness = r.tightness;
        c.iterations = r.solver_iterations;
        c.ok = true;
      } catch (const std::exception& e) {
        c.ok = false;
        c.error = e.what();
      }
    }
  };
  const int workers = std::min<int>(cfg.threads, static_cast<int>(jobs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::sort(jobs.begin(), jobs.end(), [](const CellResult& a, const CellResult& b) {
    return std::tie(a.rho, a.k, a.sample) < std::tie(b.rho, b.k, b.sample);
  });
  TablesResult out;
  out.cells = std::move(jobs);
  for (double rho : cfg.rhos) out.tables.emplace_back(rho, Summarize(out.cells, rho));
  return out;
}

std::vector<TableRow> Summarize(const std::vector<CellResult>& cells, double rho) {
  std::map<int, std::vector<const CellResult*>> by_k;
  for (const auto& c : cells) {
    if (c.rho == rho) by_k[c.k].push_back(&c);
  }
  std::vector<TableRow> rows;
  for (const auto& [k, group] : by_k) {
    TableRow row;
    row.k = k;
    std::vector<double> upper, lower, direct;
    for (const CellResult* c : group) {
      if (!c->ok) {
        ++row.samples_failed;
        continue;
      }
      ++row.samples_ok;
      upper.push_back(c->alpha_upper);
      if (c->alpha_lower) lower.push_back(*c->alpha_lower);
      if (c->alpha_lower_direct) direct.push_back(*c->alpha_lower_direct);
    }
    if (!upper.empty()) {
      row.median_upper = Median(upper);
      row.min_upper = *std::min_element(upper.begin(), upper.end());
      row.max_upper = *std::max_element(upper.begin(), upper.end());
      row.certified = row.median_upper < 0.5;
    }
    if (!lower.empty()) row.median_lower = Median(lower);
    if (!direct.empty()) row.median_direct = Median(direct);
    rows.push_back(row);
  }
  return rows;
}

void WriteTableCsv(std::ostream& out, const std::vector<TableRow>& rows) {
  out << "k,median_upper,median_lower,median_direct,min_upper,max_upper,"
         "certified,samples_ok,samples_failed\n";
  for (const auto& r : rows) {
    const bool any = r.samples_ok > 0;
    out << r.k << ',' << (any ? Num(r.median_upper) : "") << ','
        << Num(r.median_lower) << ',' << Num(r.median_direct) << ','
        << (any ? Num(r.min_upper) : "") << ',' << (any ? Num(r.max_upper) : "")
        << ',' << (r.certified ? 1 : 0) << ',' << r.samples_ok << ','
        << r.samples_failed << '\n';
  }
}

void WriteCellsCsv(std::ostream& out, const std::vector<CellResult>& cells) {
  out << "rho,m,sample,seed,k,status,alpha_upper,alpha_lower,alpha_lower_theorem,"
         "alpha_lower_direct,relaxation_lower,mu,delta,g,h,iterations\n";
  for (const auto& c : cells) {
    out << RhoTag(c.rho) << ',' << c.m << ',' << c.sample << ',' << c.seed << ','
        << c.k << ',' << (c.ok ? "ok" : "failed") << ',';
    if (!c.ok) {
      out << ",,,,,,,,,\n";
      continue;
    }
    out << Num(c.alpha_upper) << ',' << Num(c.alpha_lower) << ','
        << Num(c.alpha_lower_theorem) << ',' << Num(c.alpha_lower_direct) << ','
        << Num(c.relaxation_lower) << ',';
    if (c.tightness) {
      out << Num(c.tightness->mu) << ',' << Num(c.tightness->delta) << ','
          << Num(c.tightness->g) << ',' << Num(c.tightness->h);
    } else {
      out << ",,,";
    }
    out << ',' << c.iterations << '\n';
  }
}

std::vector<std::string> WriteTables(const ExperimentConfig& cfg,
                                     const TablesResult& result) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot create " + cfg.out_dir + ": " + ec.message());
  }
  std::vector<std::string> paths;
  auto open = [&](const std::string& name) {
    const std::string path = (fs::path(cfg.out_dir) / name).string();
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + path);
    paths.push_back(path);
    return f;
  };
  const std::string ens = ToString(cfg.ensemble);
  for (const auto& [rho, rows] : result.tables) {
    std::ofstream f = open("table_" + ens + "_rho" + RhoTag(rho) + ".csv");
    WriteTableCsv(f, rows);
  }
  std::ofstream f = open("cells_" + ens + ".csv");
  WriteCellsCsv(f, result.cells);
  return paths;
}

void RecoverConfig::Validate() const {
  ValidateInstance(instance);
  if (k_min < 1 || k_max < k_min || k_max > instance.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "need 1 <= k_min <= k_max <= n");
  }
  if (trials < 1) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
}

RecoverResult RunRecover(const RecoverConfig& cfg) {
  cfg.Validate();
  const ProblemInstance& inst = cfg.instance;
  const int n = inst.cols();
  const NullspaceBasis basis = ComputeNullspace(inst);
  Rng rng(cfg.seed, 5);
  std::vector<int> perm(n);
  RecoverResult out;
  bool bounding = true;
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    RecoverRow row;
    row.k = k;
    row.trials = cfg.trials;
    if (bounding) {
      BisectionOptions bo;
      bo.epsilon = cfg.bound.epsilon;
      bo.tol = cfg.bound.bisect_tol;
      bo.max_iters = cfg.bound.max_iters;
      row.alpha_upper = UpperBoundAlpha(basis, k, bo).alpha_upper;
      const RecoveryCertificate rc = MakeRecoveryCertificate(*row.alpha_upper);
      row.certified = rc.lp_decoder_certified;
      row.error_constant = rc.error_constant;
      if (row.certified) {
        out.strong_threshold = k;
      } else {
        bounding = false;
      }
    }
    int recovered = 0;
    int decoded = 0;
    double err_sum = 0.0;
    double sigma_sum = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
      for (int i = 0; i < n; ++i) perm[i] = i;
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.Below(n - i));
        std::swap(perm[i], perm[j]);
        x0(perm[i]) = 2.0 * rng.Uniform() - 1.0;
      }
      sigma_sum += SigmaK(x0, k);
      try {
        const DecodeResult d = DecodeL1(
            inst, inst.a * x0, x0, k,
            row.certified ? row.alpha_upper : std::nullopt);
        ++decoded;
        err_sum += (d.x_hat - x0).lpNorm<1>();
        if (d.exact_recovery.value_or(false)) ++recovered;
      } catch (const Error&) {
        ++row.decoder_failures;
      }
    }
    row.recovery_prob = static_cast<double>(recovered) / cfg.trials;
    row.mean_l1_error = decoded > 0 ? err_sum / decoded : 0.0;
    if (row.certified && row.error_constant) {
      row.bound = *row.error_constant * sigma_sum / cfg.trials;
    }
    out.rows.push_back(row);
  }
  return out;
}

void WriteRecoverCsv(std::ostream& out, const RecoverResult& result) {
  out << "k,trials,recovery_prob,mean_l1_error,decoder_failures,alpha_upper,"
         "certified,error_constant,bound,strong_threshold\n";
  const std::string strong =
      result.strong_threshold ? std::to_string(*result.strong_threshold) : "";
  for (const auto& r : result.rows) {
    out << r.k << ',' << r.trials << ',' << Num(r.recovery_prob) << ','
        << Num(r.mean_l1_error) << ',' << r.decoder_failures << ','
        << Num(r.alpha_upper) << ',' << (r.certified ? 1 : 0) << ','
        << Num(r.error_constant) << ',' << Num(r.bound) << ',' << strong << '\n';
  }
}

TightnessSummary RunTightness(const std::vector<std::string>& cell_files, int bins) {
  if (bins < 1) throw Error(ErrorCode::kInvalidArgument, "bins must be >= 1");
  std::vector<double> k1, k_more;
  TightnessSummary out;
  for (const auto& path : cell_files) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::kIo, "cannot read " + path);
    std::string line;
    if (!std::getline(f, line)) continue;
    const std::vector<std::string> header = SplitCsv(line);
    const auto col = [&](const char* name) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) {
        throw Error(ErrorCode::kMalformedFile, path + ": missing column " + name);
      }
      return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t kcol = col("k");
    const std::size_t mucol = col("mu");
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> fields = SplitCsv(line);
      if (fields.size() != header.size()) {
        throw Error(ErrorCode::kMalformedFile, path + ": ragged row");
      }
      if (fields[mucol].empty()) {
        ++out.skipped;
        continue;
      }
      double mu = 0.0;
      int k = 0;
      try {
        mu = std::stod(fields[mucol]);
        k = std::stoi(fields[kcol]);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kMalformedFile, path + ": bad number in row");
      }
      if (!(mu > 0) || !std::isfinite(mu)) {
        ++out.skipped;
        continue;
      }
      (k == 1 ? k1 : k_more).push_back(std::log10(mu));
    }
  }
  out.used_k1 = static_cast<int>(k1.size());
  out.used_k_more = static_cast<int>(k_more.size());
  if (k1.empty() && k_more.empty()) return out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* v : {&k1, &k_more}) {
    for (double x : *v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  out.k1 = MakeHistogram(k1, bins, lo, hi);
  out.k_more = MakeHistogram(k_more, bins, lo, hi);
  if (!k1.empty()) out.iqr_k1 = InterquartileRange(k1);
  if (!k_more.empty()) out.iqr_k_more = InterquartileRange(k_more);
  return out;
}

void WriteTightnessCsv(std::ostream& out, const TightnessSummary& summary) {
  out << "series,log10_mu_lo,log10_mu_hi,count\n";
  summary.k1.WriteCsv(out, "k1");
  summary.k_more.WriteCsv(out, "k_gt_1");
}

nlohmann::json RunCounterexample(int m, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "m must be positive");
  const ProblemInstance inst = GenGaussian(m, 2 * m, seed);
  const NullspaceBasis basis = ComputeNullspace(inst);
  const PrimalCertificate cert = CounterexamplePoint(m, basis);
  constexpr double kTol = 1e-10;
  const FeasibilityReport basic =
      CheckPrimalFeasibility(cert, inst, SdpForm::kPrimalBasic);
  const FeasibilityReport col =
      CheckPrimalFeasibility(cert, inst, SdpForm::kPrimalColumnwise);
  return {{"m", m},
          {"n", 2 * m},
          {"k", cert.k},
          {"seed", seed},
          {"objective", cert.objective()},
          {"basic", ToJson(basic, kTol)},
          {"columnwise", ToJson(col, kTol)},
          {"feasible", basic.Feasible(kTol) && col.Feasible(kTol)}};
}

}  // namespace nspcert
