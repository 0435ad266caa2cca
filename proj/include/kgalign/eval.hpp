#pragma once
// Accuracy metrics, matching oracles, and dense baselines.
//
// Ranking rule over sparse rows: candidates are the row's stored entries,
// ordered by value descending with ties broken by lower column id. Coordinates
// absent from the support rank below every stored entry, so an absent true
// target is a miss regardless of N.

#include <map>
#include <string>
#include <vector>

#include "kgalign/kg.hpp"
#include "kgalign/mat.hpp"
#include "kgalign/sparse.hpp"

namespace kgalign {

struct EvalReport {
  std::map<int, double> hits_at;               // N -> fraction
  double mrr = 0.0;
  std::vector<std::pair<std::string, double>> stage_seconds;
  double peak_rss_mb = 0.0;                    // allocator high-water estimate
  std::map<std::string, double> sampler_overlap;
};

// Rank of (source -> true target) under the rule above; 0 means "absent".
int rank_in_row(const SparseSim& m, int row, int true_col);

double hits_at_n(const SparseSim& m, const AlignmentSet& test, int n);
double mrr(const SparseSim& m, const AlignmentSet& test);

// Maximum-total-similarity perfect matching on a square matrix (Kuhn-Munkres,
// O(n^3)). Returns assignment[row] = col.
std::vector<int> hungarian(const Mat<double>& sim);
double assignment_total(const Mat<double>& sim, const std::vector<int>& assignment);

// Textbook CSLS over a full matrix: 2*sim(s,t) - rS(t) - rT(s) where rT(s) is
// the mean of row s's top-Kn values and rS(t) the mean of column t's top-Kn.
Mat<double> dense_csls(const Mat<double>& sim, int kn);

// Row-argmax baseline; reports hits@1 of taking each row's best candidate.
double greedy_top1(const SparseSim& m, const AlignmentSet& test);

// Current process peak resident set (VmHWM) in MB; 0 if unavailable.
double peak_rss_mb();

void write_report_text(const EvalReport& r, const std::string& path);
void write_report_json(const EvalReport& r, const std::string& path);
EvalReport read_report_json(const std::string& path);

}  // namespace kgalign
