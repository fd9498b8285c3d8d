#include "fran/qnetwork.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fran {

namespace {

constexpr int kCheckpointVersion = 1;
constexpr const char* kCheckpointFormat = "fran-qnetwork";

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, Activation act)
{
    return act == Activation::relu ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
}

std::vector<DenseLayer> zero_like(const std::vector<DenseLayer>& layers)
{
    std::vector<DenseLayer> out;
    for (const auto& l : layers)
        out.push_back({Eigen::MatrixXd::Zero(l.W.rows(), l.W.cols()), Eigen::VectorXd::Zero(l.b.size())});
    return out;
}

nlohmann::json layers_to_json(const std::vector<DenseLayer>& layers)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& l : layers) {
        std::vector<double> w;
        w.reserve(l.W.size());
        for (Eigen::Index r = 0; r < l.W.rows(); ++r)
            for (Eigen::Index c = 0; c < l.W.cols(); ++c) w.push_back(l.W(r, c));
        arr.push_back({{"rows", l.W.rows()},
                       {"cols", l.W.cols()},
                       {"weights", w},
                       {"bias", std::vector<double>(l.b.data(), l.b.data() + l.b.size())}});
    }
    return arr;
}

std::vector<DenseLayer> layers_from_json(const nlohmann::json& arr, const std::vector<int>& dims)
{
    if (!arr.is_array() || arr.size() + 1 != dims.size()) throw std::runtime_error("checkpoint: layer count mismatch");
    std::vector<DenseLayer> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& j = arr[i];
        const int rows = j.at("rows").get<int>();
        const int cols = j.at("cols").get<int>();
        if (rows != dims[i + 1] || cols != dims[i]) throw std::runtime_error("checkpoint: layer shape mismatch");
        const auto w = j.at("weights").get<std::vector<double>>();
        const auto b = j.at("bias").get<std::vector<double>>();
        if (static_cast<int>(w.size()) != rows * cols || static_cast<int>(b.size()) != rows)
            throw std::runtime_error("checkpoint: parameter count mismatch");
        DenseLayer l{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) l.W(r, c) = w[static_cast<std::size_t>(r) * cols + c];
        for (int r = 0; r < rows; ++r) l.b(r) = b[r];
        out.push_back(std::move(l));
    }
    return out;
}

} // namespace

QNetwork::QNetwork(std::vector<int> layer_dims, Activation hidden) : dims_(std::move(layer_dims)), hidden_(hidden)
{
    if (dims_.size() < 2) throw std::invalid_argument("network needs at least an input and an output layer");
    for (int d : dims_)
        if (d < 1) throw std::invalid_argument("layer sizes must be positive");
    for (std::size_t i = 0; i + 1 < dims_.size(); ++i)
        layers_.push_back({Eigen::MatrixXd::Zero(dims_[i + 1], dims_[i]), Eigen::VectorXd::Zero(dims_[i + 1])});
}

QNetwork QNetwork::random(std::vector<int> layer_dims, Rng& rng, Activation hidden)
{
    QNetwork net(std::move(layer_dims), hidden);
    for (auto& l : net.layers_) {
        const double limit = std::sqrt(6.0 / static_cast<double>(l.W.rows() + l.W.cols()));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (Eigen::Index r = 0; r < l.W.rows(); ++r)
            for (Eigen::Index c = 0; c < l.W.cols(); ++c) l.W(r, c) = dist(rng);
    }
    return net;
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& x) const
{
    if (x.size() != input_size()) throw std::invalid_argument("network input has the wrong length");
    return forward_batch(x);
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& X) const
{
    if (X.rows() != input_size()) throw std::invalid_argument("network input has the wrong length");
    Eigen::MatrixXd a = X;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        Eigen::MatrixXd z = (layers_[i].W * a).colwise() + layers_[i].b;
        a = i + 1 < layers_.size() ? activate(z, hidden_) : z;
    }
    return a;
}

bool QNetwork::all_finite() const
{
    for (const auto& l : layers_)
        if (!l.W.allFinite() || !l.b.allFinite()) return false;
    return true;
}

Gradients zero_gradients(const QNetwork& net) { return zero_like(net.layers()); }

LossAndGradients gradients(const QNetwork& net, const Eigen::MatrixXd& X, std::span<const int> actions,
                           const Eigen::VectorXd& targets)
{
    const Eigen::Index B = X.cols();
    if (B == 0) throw std::invalid_argument("gradient of an empty batch");
    if (static_cast<Eigen::Index>(actions.size()) != B || targets.size() != B)
        throw std::invalid_argument("batch inputs, actions and targets disagree in length");

    const auto& layers = net.layers();
    const std::size_t depth = layers.size();
    std::vector<Eigen::MatrixXd> acts{X}; // activations entering each layer
    std::vector<Eigen::MatrixXd> pre;
    for (std::size_t i = 0; i < depth; ++i) {
        pre.push_back((layers[i].W * acts.back()).colwise() + layers[i].b);
        if (i + 1 < depth) acts.push_back(activate(pre.back(), net.hidden_activation()));
    }

    LossAndGradients out;
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(net.output_size(), B);
    for (Eigen::Index j = 0; j < B; ++j) {
        const int a = actions[j];
        if (a < 0 || a >= net.output_size()) throw std::out_of_range("action index outside the network head");
        const double residual = pre.back()(a, j) - targets(j);
        out.loss += residual * residual;
        delta(a, j) = 2.0 * residual / static_cast<double>(B);
    }
    out.loss /= static_cast<double>(B);

    out.grads = zero_like(layers);
    for (std::size_t i = depth; i-- > 0;) {
        out.grads[i].W = delta * acts[i].transpose();
        out.grads[i].b = delta.rowwise().sum();
        if (i == 0) break;
        delta = layers[i].W.transpose() * delta;
        if (net.hidden_activation() == Activation::relu) delta.array() *= (pre[i - 1].array() > 0.0).cast<double>();
    }
    return out;
}

AdamState make_adam(const QNetwork& net, double learning_rate)
{
    AdamState s;
    s.learning_rate = learning_rate;
    s.m = zero_like(net.layers());
    s.v = zero_like(net.layers());
    return s;
}

void adam_step(QNetwork& net, const Gradients& grads, AdamState& opt)
{
    auto& layers = net.layers();
    if (grads.size() != layers.size() || opt.m.size() != layers.size() || opt.v.size() != layers.size())
        throw std::invalid_argument("optimizer state does not match the network");
    ++opt.step_count;
    const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step_count));
    const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step_count));
    auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
        m = opt.beta1 * m + (1.0 - opt.beta1) * g;
        v = opt.beta2 * v + (1.0 - opt.beta2) * g.cwiseProduct(g);
        p.array() -= opt.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + opt.epsilon);
    };
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (grads[i].W.rows() != layers[i].W.rows() || grads[i].W.cols() != layers[i].W.cols())
            throw std::invalid_argument("gradient shape does not match the network");
        update(layers[i].W, grads[i].W, opt.m[i].W, opt.v[i].W);
        update(layers[i].b, grads[i].b, opt.m[i].b, opt.v[i].b);
    }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt)
{
    using nlohmann::json;
    const QNetwork& net = ckpt.net;
    json j;
    j["format"] = kCheckpointFormat;
    j["version"] = kCheckpointVersion;
    j["layer_dims"] = net.layer_dims();
    j["hidden_activation"] = net.hidden_activation() == Activation::relu ? "relu" : "identity";
    j["fingerprint"] = ckpt.fingerprint;
    j["action_space"] = ckpt.action_space;
    j["layers"] = layers_to_json(net.layers());
    if (ckpt.adam) {
        const AdamState& a = *ckpt.adam;
        j["adam"] = {{"step_count", a.step_count}, {"learning_rate", a.learning_rate}, {"beta1", a.beta1},
                     {"beta2", a.beta2},           {"epsilon", a.epsilon},             {"m", layers_to_json(a.m)},
                     {"v", layers_to_json(a.v)}};
    }

    const std::filesystem::path target(path);
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write checkpoint " + path);
        out << j.dump() << '\n';
        if (!out) throw std::runtime_error("failed writing checkpoint " + path);
    }
    std::filesystem::rename(tmp, target);
}

Checkpoint load_checkpoint(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    std::stringstream buf;
    buf << in.rdbuf();

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed checkpoint " + path + ": " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kCheckpointFormat)
            throw std::runtime_error("not a network checkpoint");
        if (j.at("version").get<int>() != kCheckpointVersion)
            throw std::runtime_error("unsupported checkpoint version " + std::to_string(j.at("version").get<int>()));
        const auto dims = j.at("layer_dims").get<std::vector<int>>();
        const std::string act = j.at("hidden_activation").get<std::string>();
        if (act != "relu" && act != "identity") throw std::runtime_error("unknown activation " + act);

        Checkpoint ck;
        ck.net = QNetwork(dims, act == "relu" ? Activation::relu : Activation::identity);
        ck.net.layers() = layers_from_json(j.at("layers"), dims);
        ck.fingerprint = j.at("fingerprint").get<std::string>();
        ck.action_space = j.at("action_space").get<std::string>();
        if (j.contains("adam")) {
            const auto& a = j["adam"];
            AdamState s;
            s.step_count = a.at("step_count").get<long>();
            s.learning_rate = a.at("learning_rate").get<double>();
            s.beta1 = a.at("beta1").get<double>();
            s.beta2 = a.at("beta2").get<double>();
            s.epsilon = a.at("epsilon").get<double>();
            s.m = layers_from_json(a.at("m"), dims);
            s.v = layers_from_json(a.at("v"), dims);
            ck.adam = std::move(s);
        }
        if (!ck.net.all_finite()) throw std::runtime_error("non-finite parameters");
        return ck;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed checkpoint " + path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("malformed checkpoint " + path + ": " + e.what());
    }
}

} // namespace fran
