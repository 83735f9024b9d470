#pragma once

#include "jkp/numeric.hpp"

#include <cstddef>

namespace jkp {

/// Training sample: covariates X (n x d, one row per observation) and
/// responses y (n).
class Dataset {
public:
    Dataset() = default;
    Dataset(Matrix x, Vector y);

    const Matrix& x() const { return x_; }
    const Vector& y() const { return y_; }

    std::size_t size() const { return static_cast<std::size_t>(y_.size()); }
    std::size_t dim() const { return static_cast<std::size_t>(x_.cols()); }

    Vector row(std::size_t i) const { return x_.row(static_cast<Eigen::Index>(i)).transpose(); }

    /// Copy with observation `i` removed.
    Dataset without(std::size_t i) const;

    /// Column means of X.
    Vector covariate_mean() const;

private:
    Matrix x_;
    Vector y_;
};

}  // namespace jkp
