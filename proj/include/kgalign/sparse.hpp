#pragma once
// Coordinate-sparse similarity matrix. Entries are kept sorted row-major with
// duplicate coordinates coalesced by summation; exact zeros are dropped.
//
// On disk:
//   text COO : first line "rows<TAB>cols<TAB>nnz", then "row<TAB>col<TAB>value"
//   binary   : magic "KGALCOO1", u64 rows/cols/nnz, then nnz * (u32,u32,f64),
//              little-endian

#include <cstdint>
#include <string>
#include <vector>

namespace kgalign {

struct SparseEntry {
  int32_t row;
  int32_t col;
  double value;
};

class SparseSim {
 public:
  SparseSim() = default;
  SparseSim(int rows, int cols) : rows_(rows), cols_(cols) {}

  // Takes arbitrary triplets, sorts and coalesces.
  static SparseSim from_triplets(int rows, int cols, std::vector<SparseEntry> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t nnz() const { return entries_.size(); }
  const std::vector<SparseEntry>& entries() const { return entries_; }

  SparseSim transposed() const;
  // Coalesced sparse sum; shapes must agree.
  SparseSim plus(const SparseSim& other) const;
  // Same support, new values (index-aligned with entries()). Unlike
  // from_triplets this keeps exact zeros: transforms such as min-max
  // normalization deliberately map the attained minimum to 0.0 without
  // shrinking the support.
  SparseSim with_values(std::vector<double> values) const;

  // Row ranges for iteration: [row_begin(r), row_end(r)) into entries().
  size_t row_begin(int r) const;
  size_t row_end(int r) const;

  void save_text(const std::string& path) const;
  void save_binary(const std::string& path) const;
  static SparseSim load_text(const std::string& path);
  static SparseSim load_binary(const std::string& path);

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<SparseEntry> entries_;  // sorted (row, col), unique, nonzero
  std::vector<size_t> rowptr_;        // size rows_+1
  void rebuild_rowptr();
};

}  // namespace kgalign
