#include "kgalign/sparse.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace kgalign {

namespace {
bool coord_less(const SparseEntry& a, const SparseEntry& b) {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}
}  // namespace

SparseSim SparseSim::from_triplets(int rows, int cols, std::vector<SparseEntry> entries) {
  for (const auto& e : entries)
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw std::runtime_error("sparse entry out of bounds");
  std::sort(entries.begin(), entries.end(), coord_less);
  SparseSim m(rows, cols);
  m.entries_.reserve(entries.size());
  for (const auto& e : entries) {
    if (!m.entries_.empty() && m.entries_.back().row == e.row && m.entries_.back().col == e.col) {
      m.entries_.back().value += e.value;
    } else {
      m.entries_.push_back(e);
    }
  }
  std::erase_if(m.entries_, [](const SparseEntry& e) { return e.value == 0.0; });
  m.rebuild_rowptr();
  return m;
}

void SparseSim::rebuild_rowptr() {
  rowptr_.assign(rows_ + 1, 0);
  for (const auto& e : entries_) rowptr_[e.row + 1]++;
  for (int r = 0; r < rows_; ++r) rowptr_[r + 1] += rowptr_[r];
}

size_t SparseSim::row_begin(int r) const { return rowptr_[r]; }
size_t SparseSim::row_end(int r) const { return rowptr_[r + 1]; }

SparseSim SparseSim::transposed() const {
  std::vector<SparseEntry> flipped;
  flipped.reserve(entries_.size());
  for (const auto& e : entries_) flipped.push_back({e.col, e.row, e.value});
  return from_triplets(cols_, rows_, std::move(flipped));
}

SparseSim SparseSim::plus(const SparseSim& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::runtime_error("sparse sum: shape mismatch");
  std::vector<SparseEntry> merged;
  merged.reserve(entries_.size() + other.entries_.size());
  merged.insert(merged.end(), entries_.begin(), entries_.end());
  merged.insert(merged.end(), other.entries_.begin(), other.entries_.end());
  return from_triplets(rows_, cols_, std::move(merged));
}

SparseSim SparseSim::with_values(std::vector<double> values) const {
  if (values.size() != entries_.size())
    throw std::runtime_error("with_values: value count does not match support");
  for (double v : values)
    if (!std::isfinite(v)) throw std::runtime_error("with_values: non-finite value");
  SparseSim out(*this);
  for (size_t i = 0; i < values.size(); ++i) out.entries_[i].value = values[i];
  return out;
}

void SparseSim::save_text(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path);
  std::fprintf(f, "%d\t%d\t%zu\n", rows_, cols_, entries_.size());
  for (const auto& e : entries_)
    std::fprintf(f, "%" PRId32 "\t%" PRId32 "\t%.17g\n", e.row, e.col, e.value);
  std::fclose(f);
}

SparseSim SparseSim::load_text(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "r");
  if (!f) throw std::runtime_error("cannot open " + path);
  int rows, cols;
  size_t nnz;
  if (std::fscanf(f, "%d\t%d\t%zu", &rows, &cols, &nnz) != 3) {
    std::fclose(f);
    throw std::runtime_error(path + ": bad COO header");
  }
  std::vector<SparseEntry> entries(nnz);
  for (size_t i = 0; i < nnz; ++i) {
    if (std::fscanf(f, "%" SCNd32 "\t%" SCNd32 "\t%lg", &entries[i].row, &entries[i].col,
                    &entries[i].value) != 3) {
      std::fclose(f);
      throw std::runtime_error(path + ": truncated COO body");
    }
  }
  std::fclose(f);
  return from_triplets(rows, cols, std::move(entries));
}

namespace {
constexpr char kCooMagic[8] = {'K', 'G', 'A', 'L', 'C', 'O', 'O', '1'};
}

void SparseSim::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kCooMagic, 8);
  uint64_t dims[3] = {static_cast<uint64_t>(rows_), static_cast<uint64_t>(cols_), entries_.size()};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  for (const auto& e : entries_) {
    uint32_t rc[2] = {static_cast<uint32_t>(e.row), static_cast<uint32_t>(e.col)};
    out.write(reinterpret_cast<const char*>(rc), sizeof(rc));
    out.write(reinterpret_cast<const char*>(&e.value), sizeof(double));
  }
}

SparseSim SparseSim::load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCooMagic, 8) != 0)
    throw std::runtime_error(path + ": not a KGALCOO1 file");
  uint64_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  std::vector<SparseEntry> entries(dims[2]);
  for (auto& e : entries) {
    uint32_t rc[2];
    in.read(reinterpret_cast<char*>(rc), sizeof(rc));
    in.read(reinterpret_cast<char*>(&e.value), sizeof(double));
    e.row = static_cast<int32_t>(rc[0]);
    e.col = static_cast<int32_t>(rc[1]);
  }
  if (!in) throw std::runtime_error(path + ": truncated COO body");
  return from_triplets(static_cast<int>(dims[0]), static_cast<int>(dims[1]), std::move(entries));
}

}  // namespace kgalign
