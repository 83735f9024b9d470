#include "jkp/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace jkp {

namespace {

std::vector<Eigen::Index> layer_offsets(const MlpArchitecture& arch) {
    if (arch.widths.size() < 2) throw std::invalid_argument("network needs at least one layer");
    if (arch.widths.back() != 1) throw std::invalid_argument("network output width must be 1");
    if (std::find(arch.widths.begin(), arch.widths.end(), std::size_t{0}) != arch.widths.end()) {
        throw std::invalid_argument("layer widths must be positive");
    }
    std::vector<Eigen::Index> offsets{0};
    for (std::size_t k = 0; k < arch.layer_count(); ++k) {
        offsets.push_back(offsets.back() + static_cast<Eigen::Index>(arch.widths[k] * arch.widths[k + 1]));
    }
    return offsets;
}

Eigen::Index rows_of(const MlpArchitecture& arch, std::size_t k) {
    return static_cast<Eigen::Index>(arch.widths[k + 1]);
}
Eigen::Index cols_of(const MlpArchitecture& arch, std::size_t k) {
    return static_cast<Eigen::Index>(arch.widths[k]);
}

}  // namespace

std::size_t MlpArchitecture::parameter_count() const {
    std::size_t count = 0;
    for (std::size_t k = 0; k + 1 < widths.size(); ++k) count += widths[k] * widths[k + 1];
    return count;
}

MlpArchitecture MlpArchitecture::true_network() {
    return {{3, 2, 1}};
}

MlpArchitecture MlpArchitecture::partial_network() {
    return {{2, 1}};
}

MlpArchitecture MlpArchitecture::deep_network(std::size_t layers, std::size_t width, std::size_t inputs) {
    if (layers < 2) throw std::invalid_argument("deep network needs at least two layers");
    MlpArchitecture arch;
    arch.widths.push_back(inputs);
    for (std::size_t k = 0; k + 1 < layers; ++k) arch.widths.push_back(width);
    arch.widths.push_back(1);
    return arch;
}

MlpParams::MlpParams(MlpArchitecture arch)
    : arch_(std::move(arch)), offsets_(layer_offsets(arch_)), flat_(Vector::Zero(offsets_.back())) {}

MlpParams::MlpParams(MlpArchitecture arch, Vector flat)
    : arch_(std::move(arch)), offsets_(layer_offsets(arch_)), flat_(std::move(flat)) {
    if (flat_.size() != offsets_.back()) throw std::invalid_argument("parameter vector does not match architecture");
}

Eigen::Map<const Matrix> MlpParams::layer(std::size_t k) const {
    return {flat_.data() + offsets_.at(k), rows_of(arch_, k), cols_of(arch_, k)};
}

Eigen::Map<Matrix> MlpParams::layer(std::size_t k) {
    return {flat_.data() + offsets_.at(k), rows_of(arch_, k), cols_of(arch_, k)};
}

MlpParams true_network_params() {
    MlpParams p(MlpArchitecture::true_network());
    auto a1 = p.layer(0);
    a1 << 1, 1, 0,
          0, 0, 1;
    auto a2 = p.layer(1);
    a2 << 1, -1;
    return p;
}

double mlp_forward(const MlpParams& params, const Vector& x) {
    const auto& arch = params.architecture();
    if (static_cast<std::size_t>(x.size()) != arch.input_dim()) {
        throw std::invalid_argument("network input dimension mismatch");
    }
    Vector h = x;
    for (std::size_t k = 0; k < params.layer_count(); ++k) {
        h = (params.layer(k) * h).cwiseMax(0.0);
    }
    return h(0);
}

MlpObjective::MlpObjective(MlpArchitecture arch, const Dataset& data)
    : arch_(std::move(arch)), offsets_(layer_offsets(arch_)), targets_(data.y().transpose()) {
    const auto in = static_cast<Eigen::Index>(arch_.input_dim());
    if (data.x().cols() < in) throw std::invalid_argument("dataset has fewer covariates than the network reads");
    inputs_ = data.x().leftCols(in).transpose();
    const auto n = inputs_.cols();
    const auto layers = arch_.layer_count();
    pre_.resize(layers);
    post_.resize(layers + 1);
    delta_.resize(layers);
    for (std::size_t k = 0; k < layers; ++k) {
        pre_[k].resize(rows_of(arch_, k), n);
        post_[k + 1].resize(rows_of(arch_, k), n);
        delta_[k].resize(rows_of(arch_, k), n);
    }
}

void MlpObjective::forward(const Vector& flat) {
    if (flat.size() != offsets_.back()) throw std::invalid_argument("parameter vector does not match architecture");
    const Matrix* h = &inputs_;
    for (std::size_t k = 0; k < arch_.layer_count(); ++k) {
        Eigen::Map<const Matrix> a(flat.data() + offsets_[k], rows_of(arch_, k), cols_of(arch_, k));
        pre_[k].noalias() = a * (*h);
        post_[k + 1] = pre_[k].cwiseMax(0.0);
        h = &post_[k + 1];
    }
}

double MlpObjective::total_loss(const Vector& flat) {
    forward(flat);
    return (post_.back().row(0) - targets_).squaredNorm();
}

double MlpObjective::total_loss_and_gradient(const Vector& flat, Vector& gradient) {
    forward(flat);
    const std::size_t layers = arch_.layer_count();
    const Eigen::RowVectorXd residual = post_.back().row(0) - targets_;
    const double loss = residual.squaredNorm();

    gradient.resize(offsets_.back());
    delta_[layers - 1] = (2.0 * residual).array() * (pre_[layers - 1].array() > 0.0).cast<double>();
    for (std::size_t k = layers; k-- > 0;) {
        const Matrix& input = k == 0 ? inputs_ : post_[k];
        Eigen::Map<Matrix> g(gradient.data() + offsets_[k], rows_of(arch_, k), cols_of(arch_, k));
        g.noalias() = delta_[k] * input.transpose();
        if (k > 0) {
            Eigen::Map<const Matrix> a(flat.data() + offsets_[k], rows_of(arch_, k), cols_of(arch_, k));
            delta_[k - 1].noalias() = a.transpose() * delta_[k];
            delta_[k - 1].array() *= (pre_[k - 1].array() > 0.0).cast<double>();
        }
    }
    return loss;
}

double mlp_total_loss(const MlpParams& params, const Dataset& data) {
    MlpObjective objective(params.architecture(), data);
    return objective.total_loss(params.flat());
}

MlpParams mlp_gradient(const MlpParams& params, const Dataset& data) {
    MlpObjective objective(params.architecture(), data);
    Vector grad;
    objective.total_loss_and_gradient(params.flat(), grad);
    return MlpParams(params.architecture(), std::move(grad));
}

TrainerConfig TrainerConfig::opt_mse() {
    return {};
}

TrainerConfig TrainerConfig::single_restart() {
    TrainerConfig config;
    config.restarts = 1;
    config.max_iterations = 500;
    return config;
}

MlpParams init_mlp_params(const MlpArchitecture& arch, RngStream& rng) {
    MlpParams params(arch);
    for (std::size_t k = 0; k < arch.layer_count(); ++k) {
        const double sd = std::sqrt(2.0 / static_cast<double>(arch.widths[k]));
        auto a = params.layer(k);
        // Column-major fill keeps the draw order tied to the flat layout.
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = sd * rng.normal();
        }
    }
    return params;
}

namespace {

struct DescentOutcome {
    Vector theta;
    double initial_loss;
    double final_loss;
    std::size_t iterations;
};

DescentOutcome descend(MlpObjective& objective, Vector theta, const TrainerConfig& config) {
    const double scale = 1.0 / static_cast<double>(objective.sample_size());
    Vector grad;
    Vector cand_grad;
    double loss = objective.total_loss_and_gradient(theta, grad) * scale;
    grad *= scale;
    const double initial = loss;

    Vector velocity = Vector::Zero(theta.size());
    Vector candidate(theta.size());
    double step = config.initial_step;
    std::size_t it = 0;
    for (; it < config.max_iterations; ++it) {
        if (grad.lpNorm<Eigen::Infinity>() < config.gradient_tolerance) break;
        velocity = config.momentum * velocity - step * grad;
        candidate = theta + velocity;
        const double cand_loss = objective.total_loss_and_gradient(candidate, cand_grad) * scale;
        if (cand_loss <= loss) {
            theta.swap(candidate);
            grad.swap(cand_grad);
            grad *= scale;
            loss = cand_loss;
        } else {
            step *= 0.5;
            velocity.setZero();
            if (step < config.min_step) break;
        }
    }
    return {std::move(theta), initial / scale, loss / scale, it};
}

}  // namespace

TrainingResult train_mlp(const MlpArchitecture& arch, const Dataset& data, const TrainerConfig& config,
                         RngStream& rng) {
    if (config.restarts == 0) throw std::invalid_argument("trainer needs at least one restart");
    if (data.size() == 0) throw std::invalid_argument("cannot fit on an empty dataset");

    MlpObjective objective(arch, data);
    TrainingResult result{MlpParams(arch), std::numeric_limits<double>::infinity(), 0, {}, {}, {}};
    for (std::size_t r = 0; r < config.restarts; ++r) {
        RngStream init_rng = rng.split(r);
        auto outcome = descend(objective, init_mlp_params(arch, init_rng).flat(), config);
        result.initial_losses.push_back(outcome.initial_loss);
        result.final_losses.push_back(outcome.final_loss);
        result.iterations.push_back(outcome.iterations);
        if (outcome.final_loss < result.loss) {
            result.loss = outcome.final_loss;
            result.best_restart = r;
            result.params = MlpParams(arch, std::move(outcome.theta));
        }
    }
    return result;
}

namespace {

void rescale_hidden_rows(MlpParams& p) {
    auto a1 = p.layer(0);
    auto a2 = p.layer(1);
    for (Eigen::Index j = 0; j < a1.rows(); ++j) {
        const double s = a1.row(j).cwiseAbs().maxCoeff();
        if (s > 0.0) {
            a1.row(j) /= s;
            a2(0, j) *= s;
        }
    }
}

MlpParams swap_hidden_units(const MlpParams& p) {
    MlpParams out = p;
    out.layer(0).row(0) = p.layer(0).row(1);
    out.layer(0).row(1) = p.layer(0).row(0);
    out.layer(1)(0, 0) = p.layer(1)(0, 1);
    out.layer(1)(0, 1) = p.layer(1)(0, 0);
    return out;
}

// For output weights b_p > 0 > b_q the network relu(b_p relu(p) + b_q relu(q))
// equals relu(relu(b_p p + b_q q) - relu(b_q q)) with b_q q = -|b_q| q: the
// identity relu(relu(u) - relu(v)) = relu(relu(u - v) - relu(-v)) holds for
// all real u, v. Returns that second parameterization, or nothing when the
// output weights do not have mixed signs.
std::optional<MlpParams> reflect_hidden_units(const MlpParams& p) {
    const auto a2 = p.layer(1);
    Eigen::Index pos = 0;
    Eigen::Index neg = 1;
    if (a2(0, 0) < 0.0 && a2(0, 1) > 0.0) std::swap(pos, neg);
    if (!(a2(0, pos) > 0.0 && a2(0, neg) < 0.0)) return std::nullopt;
    const Eigen::RowVectorXd u = a2(0, pos) * p.layer(0).row(pos);
    const Eigen::RowVectorXd v = -a2(0, neg) * p.layer(0).row(neg);
    MlpParams out = p;
    out.layer(0).row(pos) = u - v;
    out.layer(0).row(neg) = -v;
    out.layer(1)(0, pos) = 1.0;
    out.layer(1)(0, neg) = -1.0;
    return out;
}

}  // namespace

MlpParams canonicalize_mlp(const MlpParams& params, const MlpParams& reference) {
    if (params.architecture() != MlpArchitecture::true_network() ||
        reference.architecture() != MlpArchitecture::true_network()) {
        throw std::invalid_argument("canonicalization is defined for the 3-2-1 network");
    }
    MlpParams ref = reference;
    rescale_hidden_rows(ref);

    std::vector<MlpParams> candidates{params};
    if (auto reflected = reflect_hidden_units(params)) candidates.push_back(std::move(*reflected));

    std::optional<MlpParams> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (auto& c : candidates) {
        rescale_hidden_rows(c);
        for (MlpParams option : {c, swap_hidden_units(c)}) {
            const double dist = (option.flat() - ref.flat()).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best = std::move(option);
            }
        }
    }
    return *best;
}

MlpParams canonicalize_mlp(const MlpParams& params) {
    return canonicalize_mlp(params, true_network_params());
}

MlpModel::MlpModel(MlpParams params, std::size_t input_dim) : params_(std::move(params)), input_dim_(input_dim) {
    if (input_dim_ < params_.architecture().input_dim()) {
        throw std::invalid_argument("network reads more covariates than provided");
    }
}

double MlpModel::predict(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != input_dim_) throw std::invalid_argument("covariate dimension mismatch");
    return mlp_forward(params_, x.head(static_cast<Eigen::Index>(params_.architecture().input_dim())));
}

MlpLearner::MlpLearner(MlpArchitecture arch, std::size_t input_dim, TrainerConfig trainer, std::string id)
    : arch_(std::move(arch)), input_dim_(input_dim), trainer_(trainer), id_(std::move(id)) {
    if (input_dim_ < arch_.input_dim()) throw std::invalid_argument("network reads more covariates than provided");
}

std::shared_ptr<const FittedModel> MlpLearner::fit(const Dataset& data, RngStream& rng) const {
    if (data.dim() != input_dim_) throw std::invalid_argument("covariate dimension mismatch");
    auto trained = train_mlp(arch_, data, trainer_, rng);
    return std::make_shared<MlpModel>(std::move(trained.params), input_dim_);
}

}  // namespace jkp
