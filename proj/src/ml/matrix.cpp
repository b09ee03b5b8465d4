#include "stf/ml/matrix.hpp"

#include <algorithm>

namespace stf {

Matrix Matrix::take_rows(const std::vector<std::size_t>& idx) const {
    Matrix out(idx.size(), cols);
    for (std::size_t i = 0; i < idx.size(); ++i) std::copy_n(row(idx[i]), cols, out.row(i));
    return out;
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = (*this)(r, c);
    return out;
}

}  // namespace stf
