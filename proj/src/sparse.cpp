#include "morph/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

namespace morph {

std::vector<double> CsrMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) y[i] += vals[k] * x[cols[k]];
    return y;
}

double CsrMatrix::row_sum(int row) const {
    double s = 0.0;
    for (int k = row_offsets[row]; k < row_offsets[row + 1]; ++k) s += vals[k];
    return s;
}

double CsrMatrix::symmetry_defect() const {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
            int j = cols[k];
            double aji = 0.0;
            for (int l = row_offsets[j]; l < row_offsets[j + 1]; ++l)
                if (cols[l] == i) {
                    aji = vals[l];
                    break;
                }
            worst = std::max(worst, std::abs(vals[k] - aji));
        }
    return worst;
}

CsrMatrix CsrBuilder::finalize() const {
    CsrMatrix m;
    m.n = n_;
    std::vector<int> count(n_, 0);
    for (const Triplet& t : trip_) ++count[t.row];
    std::vector<int> start(n_ + 1, 0);
    for (int i = 0; i < n_; ++i) start[i + 1] = start[i] + count[i];
    // bucket triplets by row, preserving insertion order within a row
    std::vector<int> order(trip_.size());
    {
        std::vector<int> cursor(start.begin(), start.end() - 1);
        for (std::size_t t = 0; t < trip_.size(); ++t) order[cursor[trip_[t].row]++] = static_cast<int>(t);
    }
    m.row_offsets.assign(n_ + 1, 0);
    std::vector<int> idx;
    for (int i = 0; i < n_; ++i) {
        idx.assign(order.begin() + start[i], order.begin() + start[i + 1]);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return trip_[a].col < trip_[b].col; });
        std::size_t k = 0;
        while (k < idx.size()) {
            int col = trip_[idx[k]].col;
            double sum = 0.0;
            while (k < idx.size() && trip_[idx[k]].col == col) sum += trip_[idx[k++]].val;
            if (sum != 0.0) {
                m.cols.push_back(col);
                m.vals.push_back(sum);
            }
        }
        m.row_offsets[i + 1] = static_cast<int>(m.cols.size());
    }
    return m;
}

}  // namespace morph
