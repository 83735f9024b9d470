#pragma once

#include "jkp/dataset.hpp"
#include "jkp/numeric.hpp"
#include "jkp/rng.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <string>

namespace jkp {

/// A trained model. predict() is a pure function of the stored parameters.
class FittedModel {
public:
    virtual ~FittedModel() = default;

    virtual double predict(const Vector& x) const = 0;

    /// Covariate dimension expected by predict().
    virtual std::size_t input_dim() const = 0;
};

class FeatureMap;

/// A learning procedure mapping (dataset, rng) to a fitted model.
class Learner {
public:
    virtual ~Learner() = default;

    virtual std::string id() const = 0;

    virtual std::shared_ptr<const FittedModel> fit(const Dataset& data, RngStream& rng) const = 0;

    /// Non-null when this learner is plain least squares over a feature map,
    /// which enables the closed-form leave-one-out path.
    virtual const FeatureMap* linear_features() const { return nullptr; }
};

enum class FeatureKind {
    FullLinear,     // (1, x_1, ..., x_d)
    DropLast,       // (1, x_1, ..., x_{d-1}); (1, z) for x = (z, w)
    FirstSquared,   // (1, x_1^2)
    InterceptOnly,  // (1)
};

/// Feature expansion for the least-squares working models. Every map
/// carries an intercept column.
class FeatureMap {
public:
    FeatureMap(FeatureKind kind, std::size_t input_dim);

    FeatureKind kind() const { return kind_; }
    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const;

    Vector expand(const Vector& x) const;
    Matrix expand_rows(const Matrix& x) const;

private:
    FeatureKind kind_;
    std::size_t input_dim_;
};

Vector feature_expand(const FeatureMap& map, const Vector& x);

/// Least squares on expanded features.
class OlsLearner final : public Learner {
public:
    OlsLearner(FeatureMap map, std::string id);

    std::string id() const override { return id_; }
    std::shared_ptr<const FittedModel> fit(const Dataset& data, RngStream& rng) const override;
    const FeatureMap* linear_features() const override { return &map_; }

private:
    FeatureMap map_;
    std::string id_;
};

class LinearFeatureModel final : public FittedModel {
public:
    LinearFeatureModel(FeatureMap map, Vector coefficients);

    double predict(const Vector& x) const override;
    std::size_t input_dim() const override { return map_.input_dim(); }
    const Vector& coefficients() const { return coefficients_; }

private:
    FeatureMap map_;
    Vector coefficients_;
};

/// Ignores the data and always returns the same prediction rule. Used for
/// adversarial and degenerate learners in coverage checks.
class FixedRuleLearner final : public Learner {
public:
    using Rule = std::function<double(const Vector&)>;

    FixedRuleLearner(Rule rule, std::size_t input_dim, std::string id);

    std::string id() const override { return id_; }
    std::shared_ptr<const FittedModel> fit(const Dataset& data, RngStream& rng) const override;

private:
    Rule rule_;
    std::size_t input_dim_;
    std::string id_;
};

/// The four least-squares working models for covariates (z, w).
OlsLearner make_linear_learner(FeatureKind kind, std::size_t input_dim = 2);

/// Canonical id for a linear learner: mu0..mu3.
std::string linear_learner_id(FeatureKind kind);

}  // namespace jkp
