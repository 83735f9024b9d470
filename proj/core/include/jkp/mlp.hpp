#pragma once

#include "jkp/dataset.hpp"
#include "jkp/learners.hpp"
#include "jkp/numeric.hpp"
#include "jkp/rng.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace jkp {

/// Bias-free ReLU network shape. widths.front() is the number of leading
/// covariates consumed, widths.back() must be 1. ReLU is applied after every
/// layer, the output layer included.
struct MlpArchitecture {
    std::vector<std::size_t> widths;

    std::size_t layer_count() const { return widths.size() - 1; }
    std::size_t input_dim() const { return widths.front(); }
    std::size_t parameter_count() const;

    /// 3 -> 2 -> 1, the shape of the data-generating network.
    static MlpArchitecture true_network();
    /// 2 -> 1 on the leading two covariates (w omitted).
    static MlpArchitecture partial_network();
    /// `layers` weight matrices: inputs -> width x (layers - 1) -> 1.
    static MlpArchitecture deep_network(std::size_t layers, std::size_t width = 20, std::size_t inputs = 3);

    bool operator==(const MlpArchitecture&) const = default;
};

/// Weights A_1..A_L stored back to back (each column-major) in one flat
/// vector, so optimizers and finite-difference checks work on a Vector.
class MlpParams {
public:
    explicit MlpParams(MlpArchitecture arch);
    MlpParams(MlpArchitecture arch, Vector flat);

    const MlpArchitecture& architecture() const { return arch_; }
    std::size_t layer_count() const { return arch_.layer_count(); }

    Eigen::Map<const Matrix> layer(std::size_t k) const;
    Eigen::Map<Matrix> layer(std::size_t k);

    const Vector& flat() const { return flat_; }
    Vector& flat() { return flat_; }

private:
    MlpArchitecture arch_;
    std::vector<Eigen::Index> offsets_;
    Vector flat_;
};

/// a11 = a12 = a23 = 1, a13 = a21 = a22 = 0, A2 = (1, -1):
/// max(0, max(0, z1 + z2) - max(0, w)).
MlpParams true_network_params();

/// Network output for an input of exactly architecture().input_dim() entries.
double mlp_forward(const MlpParams& params, const Vector& x);

/// Sum over the dataset of (y_j - mu(x_j))^2. Inputs are the leading
/// input_dim() covariates of each row.
double mlp_total_loss(const MlpParams& params, const Dataset& data);

/// Gradient of mlp_total_loss; the ReLU derivative at 0 is taken as 0.
MlpParams mlp_gradient(const MlpParams& params, const Dataset& data);

/// Batched loss/gradient evaluator with reusable buffers. Not thread-safe;
/// use one per fit.
class MlpObjective {
public:
    MlpObjective(MlpArchitecture arch, const Dataset& data);

    std::size_t sample_size() const { return static_cast<std::size_t>(targets_.size()); }

    double total_loss(const Vector& flat);
    double total_loss_and_gradient(const Vector& flat, Vector& gradient);

private:
    void forward(const Vector& flat);

    MlpArchitecture arch_;
    std::vector<Eigen::Index> offsets_;
    Matrix inputs_;  // input_dim x n
    Eigen::RowVectorXd targets_;
    std::vector<Matrix> pre_;   // pre-activations per layer
    std::vector<Matrix> post_;  // post_[0] aliases inputs_, post_[k+1] = relu(pre_[k])
    std::vector<Matrix> delta_;
};

struct TrainerConfig {
    std::size_t restarts = 20;
    std::size_t max_iterations = 5000;
    double initial_step = 1e-2;
    double momentum = 0.9;
    double gradient_tolerance = 1e-6;
    double min_step = 1e-12;

    /// Multi-restart direct MSE minimization.
    static TrainerConfig opt_mse();
    /// One restart, short budget; a stand-in for package-default fitting.
    static TrainerConfig single_restart();
};

struct TrainingResult {
    MlpParams params;
    double loss = 0.0;  // total squared error at params
    std::size_t best_restart = 0;
    std::vector<double> initial_losses;  // per restart
    std::vector<double> final_losses;    // per restart
    std::vector<std::size_t> iterations; // per restart
};

/// Entries ~ N(0, 2 / fan_in).
MlpParams init_mlp_params(const MlpArchitecture& arch, RngStream& rng);

/// Full-batch gradient descent with momentum on the mean squared error.
/// A step that increases the loss is rejected, the step size halved and the
/// velocity reset. Restart r starts from init_mlp_params(arch, rng.split(r));
/// the lowest final loss wins, ties to the lower restart index.
TrainingResult train_mlp(const MlpArchitecture& arch, const Dataset& data, const TrainerConfig& config,
                         RngStream& rng);

/// Picks one representative among equivalent parameterizations of a 3 -> 2
/// -> 1 network. Three symmetries are removed: each hidden row of A_1 is
/// divided by its largest absolute entry (an all-zero row is left alone) with
/// the factor moved into A_2; the two hidden units may be swapped; and when
/// A_2 has one positive and one negative entry the network may be rewritten
/// through relu(relu(u) - relu(v)) = relu(relu(u - v) - relu(-v)). Among the
/// candidates the one closest to the canonicalized reference is returned,
/// ties to the unreflected, unswapped form.
MlpParams canonicalize_mlp(const MlpParams& params, const MlpParams& reference);
MlpParams canonicalize_mlp(const MlpParams& params);

class MlpModel final : public FittedModel {
public:
    MlpModel(MlpParams params, std::size_t input_dim);

    double predict(const Vector& x) const override;
    std::size_t input_dim() const override { return input_dim_; }
    const MlpParams& params() const { return params_; }

private:
    MlpParams params_;
    std::size_t input_dim_;
};

/// Network learner. The network reads the leading arch.input_dim()
/// covariates of `input_dim`-dimensional rows.
class MlpLearner final : public Learner {
public:
    MlpLearner(MlpArchitecture arch, std::size_t input_dim, TrainerConfig trainer, std::string id);

    std::string id() const override { return id_; }
    std::shared_ptr<const FittedModel> fit(const Dataset& data, RngStream& rng) const override;

    const MlpArchitecture& architecture() const { return arch_; }
    const TrainerConfig& trainer() const { return trainer_; }

private:
    MlpArchitecture arch_;
    std::size_t input_dim_;
    TrainerConfig trainer_;
    std::string id_;
};

}  // namespace jkp
