#pragma once

#include <utility>
#include <vector>

namespace morph {

// Square sparse matrix in compressed row storage. Entries within a row are
// column-sorted with duplicates merged; exact zeros are dropped at finalize.
struct CsrMatrix {
    int n = 0;
    std::vector<int> row_offsets;  // size n+1
    std::vector<int> cols;
    std::vector<double> vals;

    int nnz() const { return static_cast<int>(vals.size()); }
    std::vector<double> multiply(const std::vector<double>& x) const;
    double row_sum(int row) const;
    // Max |A_ij - A_ji| over stored entries (structurally missing = 0).
    double symmetry_defect() const;
};

// Triplet accumulator. add() order defines the accumulation order inside
// finalize(), which keeps results bitwise reproducible.
class CsrBuilder {
  public:
    explicit CsrBuilder(int n) : n_(n) {}
    void add(int row, int col, double value) { trip_.push_back({row, col, value}); }
    void reserve(std::size_t nnz) { trip_.reserve(nnz); }
    CsrMatrix finalize() const;

  private:
    struct Triplet {
        int row, col;
        double val;
    };
    int n_;
    std::vector<Triplet> trip_;
};

// Assembled operator: matrix plus right-hand side.
struct SparseOperator {
    CsrMatrix matrix;
    std::vector<double> rhs;
};

}  // namespace morph
