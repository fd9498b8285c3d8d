#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fran/rng.hpp"

namespace fran {

enum class Activation { relu, identity };

struct DenseLayer {
    Eigen::MatrixXd W; // out x in
    Eigen::VectorXd b;
};

using Gradients = std::vector<DenseLayer>;

/// Fully connected Q-network: hidden layers use `hidden_activation`, the
/// output layer is affine.
class QNetwork {
public:
    QNetwork() = default;
    /// All parameters zero.
    explicit QNetwork(std::vector<int> layer_dims, Activation hidden = Activation::relu);

    /// Uniform in +-sqrt(6 / (fan_in + fan_out)), zero biases.
    static QNetwork random(std::vector<int> layer_dims, Rng& rng, Activation hidden = Activation::relu);

    const std::vector<int>& layer_dims() const { return dims_; }
    int input_size() const { return dims_.front(); }
    int output_size() const { return dims_.back(); }
    Activation hidden_activation() const { return hidden_; }

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    /// Throws std::invalid_argument on an input of the wrong length.
    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    /// Column j of the result is the Q-vector of column j of X.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& X) const;

    bool all_finite() const;
    bool same_shape(const QNetwork& other) const { return dims_ == other.dims_; }

private:
    std::vector<int> dims_;
    Activation hidden_ = Activation::relu;
    std::vector<DenseLayer> layers_;
};

Gradients zero_gradients(const QNetwork& net);

struct LossAndGradients {
    double loss = 0.0; // mean squared error over the batch
    Gradients grads;
};

/// Gradient of mean_i (Q(x_i)[a_i] - y_i)^2. Columns of X are the inputs.
LossAndGradients gradients(const QNetwork& net, const Eigen::MatrixXd& X, std::span<const int> actions,
                           const Eigen::VectorXd& targets);

struct AdamState {
    long step_count = 0;
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::vector<DenseLayer> m;
    std::vector<DenseLayer> v;
};

AdamState make_adam(const QNetwork& net, double learning_rate = 1e-4);

/// Bias-corrected Adam update in place.
void adam_step(QNetwork& net, const Gradients& grads, AdamState& opt);

struct Checkpoint {
    QNetwork net;
    std::optional<AdamState> adam;
    std::string fingerprint;  // scenario fingerprint of the producing run
    std::string action_space; // "full" or "processor-only"
};

/// Versioned JSON with full round-trip precision; written atomically.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
/// Throws std::runtime_error on a malformed, truncated or wrong-version file.
Checkpoint load_checkpoint(const std::string& path);

} // namespace fran
