#include "kgalign/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace kgalign {

int rank_in_row(const SparseSim& m, int row, int true_col) {
  const auto& es = m.entries();
  double target_value = 0.0;
  bool present = false;
  for (size_t i = m.row_begin(row); i < m.row_end(row); ++i) {
    if (es[i].col == true_col) {
      target_value = es[i].value;
      present = true;
      break;
    }
  }
  if (!present) return 0;
  int rank = 1;
  for (size_t i = m.row_begin(row); i < m.row_end(row); ++i) {
    if (es[i].col == true_col) continue;
    if (es[i].value > target_value ||
        (es[i].value == target_value && es[i].col < true_col))
      ++rank;
  }
  return rank;
}

double hits_at_n(const SparseSim& m, const AlignmentSet& test, int n) {
  if (n < 1) throw std::runtime_error("hits_at_n: N must be >= 1");
  if (test.pairs.empty()) return 0.0;
  int hits = 0;
  for (const auto& [s, t] : test.pairs) {
    int r = rank_in_row(m, s, t);
    if (r > 0 && r <= n) ++hits;
  }
  return static_cast<double>(hits) / test.size();
}

double mrr(const SparseSim& m, const AlignmentSet& test) {
  if (test.pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [s, t] : test.pairs) {
    int r = rank_in_row(m, s, t);
    if (r > 0) sum += 1.0 / r;
  }
  return sum / test.size();
}

double greedy_top1(const SparseSim& m, const AlignmentSet& test) {
  if (test.pairs.empty()) return 0.0;
  const auto& es = m.entries();
  int hits = 0;
  for (const auto& [s, t] : test.pairs) {
    int best_col = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (size_t i = m.row_begin(s); i < m.row_end(s); ++i) {
      if (es[i].value > best || (es[i].value == best && es[i].col < best_col)) {
        best = es[i].value;
        best_col = es[i].col;
      }
    }
    if (best_col == t) ++hits;
  }
  return static_cast<double>(hits) / test.size();
}

// Potential-based Kuhn-Munkres on the min-cost form; similarities are negated.
std::vector<int> hungarian(const Mat<double>& sim) {
  if (sim.rows() != sim.cols()) throw std::runtime_error("hungarian: non-square input");
  if (!all_finite(sim)) throw std::runtime_error("hungarian: non-finite input");
  const int n = sim.rows();
  const double inf = std::numeric_limits<double>::infinity();

  // 1-based arrays per the classic formulation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = -sim(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
  return assignment;
}

double assignment_total(const Mat<double>& sim, const std::vector<int>& assignment) {
  double total = 0.0;
  for (int i = 0; i < sim.rows(); ++i) total += sim(i, assignment[i]);
  return total;
}

namespace {
double mean_of_topk(std::vector<double>& vals, int k) {
  k = std::min<int>(k, static_cast<int>(vals.size()));
  std::partial_sort(vals.begin(), vals.begin() + k, vals.end(), std::greater<>());
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += vals[i];
  return s / k;
}
}  // namespace

Mat<double> dense_csls(const Mat<double>& sim, int kn) {
  if (kn < 1 || kn > std::min(sim.rows(), sim.cols()))
    throw std::runtime_error("dense_csls: Kn out of range");
  const int nr = sim.rows(), nc = sim.cols();
  std::vector<double> r_t(nr), r_s(nc);
  std::vector<double> buf;
  for (int i = 0; i < nr; ++i) {
    buf.assign(sim.row(i), sim.row(i) + nc);
    r_t[i] = mean_of_topk(buf, kn);
  }
  for (int j = 0; j < nc; ++j) {
    buf.resize(nr);
    for (int i = 0; i < nr; ++i) buf[i] = sim(i, j);
    r_s[j] = mean_of_topk(buf, kn);
  }
  Mat<double> out(nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) out(i, j) = 2.0 * sim(i, j) - r_s[j] - r_t[i];
  return out;
}

double peak_rss_mb() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      long kb = 0;
      std::sscanf(line.c_str(), "VmHWM: %ld", &kb);
      return kb / 1024.0;
    }
  }
  return 0.0;
}

void write_report_text(const EvalReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& [n, v] : r.hits_at) out << "hits@" << n << "=" << v << "\n";
  out << "mrr=" << r.mrr << "\n";
  for (const auto& [name, s] : r.stage_seconds) out << "seconds." << name << "=" << s << "\n";
  for (const auto& [name, o] : r.sampler_overlap) out << "overlap." << name << "=" << o << "\n";
  out << "peak_rss_mb=" << r.peak_rss_mb << "\n";
}

void write_report_json(const EvalReport& r, const std::string& path) {
  nlohmann::json j;
  for (const auto& [n, v] : r.hits_at) j["hits_at"][std::to_string(n)] = v;
  j["mrr"] = r.mrr;
  // Array of [name, seconds] pairs: stage order is meaningful, and JSON
  // objects would alphabetize it.
  j["stage_seconds"] = nlohmann::json::array();
  for (const auto& [name, s] : r.stage_seconds) j["stage_seconds"].push_back({name, s});
  for (const auto& [name, o] : r.sampler_overlap) j["sampler_overlap"][name] = o;
  j["peak_rss_mb"] = r.peak_rss_mb;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

EvalReport read_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  EvalReport r;
  if (j.contains("hits_at"))
    for (const auto& [k, v] : j["hits_at"].items()) r.hits_at[std::stoi(k)] = v.get<double>();
  r.mrr = j.value("mrr", 0.0);
  if (j.contains("stage_seconds"))
    for (const auto& pair : j["stage_seconds"])
      r.stage_seconds.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<double>());
  if (j.contains("sampler_overlap"))
    for (const auto& [k, v] : j["sampler_overlap"].items())
      r.sampler_overlap[k] = v.get<double>();
  r.peak_rss_mb = j.value("peak_rss_mb", 0.0);
  return r;
}

}  // namespace kgalign
