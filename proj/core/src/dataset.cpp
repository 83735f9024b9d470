#include "jkp/dataset.hpp"

#include <stdexcept>

namespace jkp {

Dataset::Dataset(Matrix x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.rows() != y_.size()) throw std::invalid_argument("covariate rows and response length differ");
    if (!x_.allFinite() || !y_.allFinite()) throw std::invalid_argument("dataset has non-finite entries");
}

Dataset Dataset::without(std::size_t i) const {
    const auto n = static_cast<Eigen::Index>(size());
    const auto idx = static_cast<Eigen::Index>(i);
    if (idx >= n) throw std::out_of_range("observation index out of range");
    Matrix x(n - 1, x_.cols());
    Vector y(n - 1);
    x.topRows(idx) = x_.topRows(idx);
    x.bottomRows(n - 1 - idx) = x_.bottomRows(n - 1 - idx);
    y.head(idx) = y_.head(idx);
    y.tail(n - 1 - idx) = y_.tail(n - 1 - idx);
    return Dataset(std::move(x), std::move(y));
}

Vector Dataset::covariate_mean() const {
    return x_.colwise().mean().transpose();
}

}  // namespace jkp
