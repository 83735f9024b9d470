#include "jkp/learners.hpp"

#include <stdexcept>

namespace jkp {

FeatureMap::FeatureMap(FeatureKind kind, std::size_t input_dim) : kind_(kind), input_dim_(input_dim) {
    if (input_dim_ == 0) throw std::invalid_argument("feature map needs at least one covariate");
    if (kind_ == FeatureKind::DropLast && input_dim_ < 2) {
        throw std::invalid_argument("drop-last feature map needs at least two covariates");
    }
}

std::size_t FeatureMap::output_dim() const {
    switch (kind_) {
        case FeatureKind::FullLinear: return input_dim_ + 1;
        case FeatureKind::DropLast: return input_dim_;
        case FeatureKind::FirstSquared: return 2;
        case FeatureKind::InterceptOnly: return 1;
    }
    return 0;
}

Vector FeatureMap::expand(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != input_dim_) {
        throw std::invalid_argument("covariate dimension mismatch in feature map");
    }
    Vector out(static_cast<Eigen::Index>(output_dim()));
    out(0) = 1.0;
    switch (kind_) {
        case FeatureKind::FullLinear: out.tail(x.size()) = x; break;
        case FeatureKind::DropLast: out.tail(x.size() - 1) = x.head(x.size() - 1); break;
        case FeatureKind::FirstSquared: out(1) = x(0) * x(0); break;
        case FeatureKind::InterceptOnly: break;
    }
    return out;
}

Matrix FeatureMap::expand_rows(const Matrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != input_dim_) {
        throw std::invalid_argument("covariate dimension mismatch in feature map");
    }
    const auto n = x.rows();
    Matrix out(n, static_cast<Eigen::Index>(output_dim()));
    out.col(0).setOnes();
    switch (kind_) {
        case FeatureKind::FullLinear: out.rightCols(x.cols()) = x; break;
        case FeatureKind::DropLast: out.rightCols(x.cols() - 1) = x.leftCols(x.cols() - 1); break;
        case FeatureKind::FirstSquared: out.col(1) = x.col(0).array().square(); break;
        case FeatureKind::InterceptOnly: break;
    }
    return out;
}

Vector feature_expand(const FeatureMap& map, const Vector& x) {
    return map.expand(x);
}

LinearFeatureModel::LinearFeatureModel(FeatureMap map, Vector coefficients)
    : map_(map), coefficients_(std::move(coefficients)) {}

double LinearFeatureModel::predict(const Vector& x) const {
    return map_.expand(x).dot(coefficients_);
}

OlsLearner::OlsLearner(FeatureMap map, std::string id) : map_(map), id_(std::move(id)) {}

std::shared_ptr<const FittedModel> OlsLearner::fit(const Dataset& data, RngStream& /*rng*/) const {
    if (data.size() == 0) throw std::invalid_argument("cannot fit on an empty dataset");
    const Matrix design = map_.expand_rows(data.x());
    return std::make_shared<LinearFeatureModel>(map_, ols_fit(design, data.y()));
}

FixedRuleLearner::FixedRuleLearner(Rule rule, std::size_t input_dim, std::string id)
    : rule_(std::move(rule)), input_dim_(input_dim), id_(std::move(id)) {}

namespace {

class FixedRuleModel final : public FittedModel {
public:
    FixedRuleModel(FixedRuleLearner::Rule rule, std::size_t dim) : rule_(std::move(rule)), dim_(dim) {}

    double predict(const Vector& x) const override {
        if (static_cast<std::size_t>(x.size()) != dim_) throw std::invalid_argument("covariate dimension mismatch");
        return rule_(x);
    }
    std::size_t input_dim() const override { return dim_; }

private:
    FixedRuleLearner::Rule rule_;
    std::size_t dim_;
};

}  // namespace

std::shared_ptr<const FittedModel> FixedRuleLearner::fit(const Dataset& data, RngStream& /*rng*/) const {
    if (data.dim() != input_dim_) throw std::invalid_argument("covariate dimension mismatch");
    return std::make_shared<FixedRuleModel>(rule_, input_dim_);
}

std::string linear_learner_id(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::FullLinear: return "mu0";
        case FeatureKind::DropLast: return "mu1";
        case FeatureKind::FirstSquared: return "mu2";
        case FeatureKind::InterceptOnly: return "mu3";
    }
    return "unknown";
}

OlsLearner make_linear_learner(FeatureKind kind, std::size_t input_dim) {
    return OlsLearner(FeatureMap(kind, input_dim), linear_learner_id(kind));
}

}  // namespace jkp
