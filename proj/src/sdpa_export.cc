// SDPA sparse export of the kernel-form problems.
//
// Free variables x, in order: U1 (upper triangle, row-major), U2, U3 (same
// layout), U4 (all n^2 entries, row-major), then s1, s2, s4 (entrywise max
// bounds of U1, U2, U4), then one bound t_ij >= |U3_ij| per upper-triangle
// entry, then (decision form only) the eigenvalue level lambda.
//
// Block 1 (PSD, size p+n): the kernel LMI
//   [[P^T U1 P, -1/2 P^T (I + U4)], [., U2 + U3]]  (- lambda I, decision).
// Block 2 (diagonal): the linearized absolute values, two rows per bounded
// entry (s - u >= 0, s + u >= 0), and for the decision form the budget row
//   alpha_bar - s1 - k^2 s2 - sum w_ij t_ij - k s4 >= 0.
//
// Objective (SDPA primal, minimized): s1 + k^2 s2 + sum w_ij t_ij + k s4 for
// primal_basic, whose optimum equals the basic relaxation value; -lambda for
// the decision form. w_ij = 1 on the diagonal and 2 off it.
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "nspcert/sdp_relaxation.h"

namespace nspcert {
namespace {

struct Entry {
  int mat;
  int block;
  int i;
  int j;
  double value;
};

class SdpaWriter {
 public:
  void Add(int mat, int block, int i, int j, double v) {
    if (v == 0.0) return;
    if (i > j) std::swap(i, j);
    entries_[{mat, block, i, j}] += v;
  }

  void Write(std::ostream& out, const std::vector<std::string>& comments,
             const std::vector<int>& blocks, const std::vector<double>& c) const {
    for (const auto& line : comments) out << "* " << line << '\n';
    out << c.size() << " = mDIM\n";
    out << blocks.size() << " = nBLOCK\n";
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      out << (b ? " " : "") << blocks[b];
    }
    out << " = bLOCKsTRUCT\n";
    char buf[64];
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", c[i]);
      out << (i ? " " : "") << buf;
    }
    out << '\n';
    for (const auto& [key, v] : entries_) {
      if (v == 0.0) continue;
      const auto& [mat, block, i, j] = key;
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << mat << ' ' << block << ' ' << i + 1 << ' ' << j + 1 << ' ' << buf
          << '\n';
    }
  }

 private:
  std::map<std::tuple<int, int, int, int>, double> entries_;
};

}  // namespace

void ExportSdpa(const SdpProblem& problem, const std::filesystem::path& path) {
  if (problem.form != SdpForm::kPrimalBasic &&
      problem.form != SdpForm::kDecision) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("SDPA export does not support form ") +
                    ToString(problem.form));
  }
  const bool decision = problem.form == SdpForm::kDecision;
  const int n = problem.n();
  const int d = problem.p();
  const double k = problem.k;
  const Eigen::MatrixXd& p = problem.basis.p;
  const int tri = n * (n + 1) / 2;

  // Variable numbering, 1-based as in SDPA.
  int next = 1;
  const int u1 = next; next += tri;
  const int u2 = next; next += tri;
  const int u3 = next; next += tri;
  const int u4 = next; next += n * n;
  const int s1 = next++;
  const int s2 = next++;
  const int s4 = next++;
  const int t3 = next; next += tri;
  const int lam = decision ? next++ : -1;
  const int num_vars = next - 1;

  SdpaWriter w;
  std::vector<double> c(num_vars, 0.0);
  const int lmi = 1;
  const int lin = 2;
  int row = 0;

  auto tri_index = [n](int i, int j) {  // i <= j
    return i * n - i * (i - 1) / 2 + (j - i);
  };

  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const int t = tri_index(i, j);
      // U1_ij contributes P^T E_ij P to the p-block.
      const Eigen::MatrixXd e =
          i == j ? Eigen::MatrixXd(p.row(i).transpose() * p.row(i))
                 : Eigen::MatrixXd(p.row(i).transpose() * p.row(j) +
                                   p.row(j).transpose() * p.row(i));
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) w.Add(u1 + t, lmi, a, b, e(a, b));
      // U2_ij and U3_ij contribute E_ij to the n-block.
      w.Add(u2 + t, lmi, d + i, d + j, 1.0);
      w.Add(u3 + t, lmi, d + i, d + j, 1.0);
      // |U1_ij| <= s1, |U2_ij| <= s2, |U3_ij| <= t_ij.
      for (auto [var, bound] : {std::pair{u1 + t, s1}, std::pair{u2 + t, s2},
                                std::pair{u3 + t, t3 + t}}) {
        w.Add(bound, lin, row, row, 1.0);
        w.Add(var, lin, row, row, -1.0);
        ++row;
        w.Add(bound, lin, row, row, 1.0);
        w.Add(var, lin, row, row, 1.0);
        ++row;
      }
      c[t3 + t - 1] = i == j ? 1.0 : 2.0;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int var = u4 + i * n + j;
      // -1/2 P^T E_ij sits in the (p, n) off-diagonal block at column j.
      for (int a = 0; a < d; ++a) w.Add(var, lmi, a, d + j, -0.5 * p(i, a));
      w.Add(s4, lin, row, row, 1.0);
      w.Add(var, lin, row, row, -1.0);
      ++row;
      w.Add(s4, lin, row, row, 1.0);
      w.Add(var, lin, row, row, 1.0);
      ++row;
    }
  }
  // Constant part: F(x) = sum F_i x_i - F_0, so F_0 is minus the constant.
  for (int a = 0; a < d; ++a)
    for (int j = 0; j < n; ++j) w.Add(0, lmi, a, d + j, 0.5 * p(j, a));

  if (decision) {
    for (int i = 0; i < n + d; ++i) w.Add(lam, lmi, i, i, -1.0);
    c[lam - 1] = -1.0;
    w.Add(0, lin, row, row, -*problem.alpha_bar);
    w.Add(s1, lin, row, row, -1.0);
    w.Add(s2, lin, row, row, -k * k);
    w.Add(s4, lin, row, row, -k);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        w.Add(t3 + tri_index(i, j), lin, row, row, i == j ? -1.0 : -2.0);
    ++row;
  } else {
    c[s1 - 1] = 1.0;
    c[s2 - 1] = k * k;
    c[s4 - 1] = k;
  }

  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream info;
  info << "form=" << ToString(problem.form) << " n=" << n << " p=" << d
       << " k=" << problem.k;
  if (decision) info << " alpha_bar=" << *problem.alpha_bar;
  w.Write(out,
          {info.str(),
           "block 1: kernel LMI of size p+n; block 2: linearized norm bounds"},
          {n + d, -row}, c);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

SdpaHeader ReadSdpaHeader(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  auto malformed = [&](const std::string& what) {
    return Error(ErrorCode::kMalformedFile, path.string() + ": " + what);
  };
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*' || line[0] == '"') continue;
    lines.push_back(line);
  }
  if (lines.size() < 4) throw malformed("truncated header");
  SdpaHeader h;
  int nblocks = 0;
  if (std::sscanf(lines[0].c_str(), "%d", &h.num_vars) != 1) {
    throw malformed("bad mDIM");
  }
  if (std::sscanf(lines[1].c_str(), "%d", &nblocks) != 1 || nblocks <= 0) {
    throw malformed("bad nBLOCK");
  }
  {
    std::istringstream ss(lines[2]);
    for (int b = 0; b < nblocks; ++b) {
      int s = 0;
      if (!(ss >> s) || s == 0) throw malformed("bad bLOCKsTRUCT");
      h.block_sizes.push_back(s);
    }
  }
  {
    std::istringstream ss(lines[3]);
    double v;
    for (int i = 0; i < h.num_vars; ++i)
      if (!(ss >> v)) throw malformed("objective vector too short");
  }
  for (std::size_t l = 4; l < lines.size(); ++l) {
    std::istringstream ss(lines[l]);
    int mat, block, i, j;
    double v;
    if (!(ss >> mat >> block >> i >> j >> v)) throw malformed("bad entry line");
    if (mat < 0 || mat > h.num_vars || block < 1 || block > nblocks) {
      throw malformed("entry index out of range");
    }
    const int size = std::abs(h.block_sizes[block - 1]);
    if (i < 1 || j < i || j > size) throw malformed("entry position invalid");
    if (h.block_sizes[block - 1] < 0 && i != j) {
      throw malformed("off-diagonal entry in a diagonal block");
    }
    ++h.num_entries;
  }
  return h;
}

}  // namespace nspcert
