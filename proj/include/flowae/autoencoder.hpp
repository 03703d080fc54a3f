#ifndef FLOWAE_AUTOENCODER_HPP
#define FLOWAE_AUTOENCODER_HPP

// Symmetric fully-connected autoencoder trained on mean squared
// reconstruction error with mini-batch Adam, L2 weight decay and inverted
// dropout. Inputs are sparse columns (one flow per column). Hidden layers
// use ReLU except the code layer (the narrowest one), which is linear, as
// is the output layer.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "common.hpp"

namespace flowae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseColumns = Eigen::SparseMatrix<double, Eigen::ColMajor>;

inline const std::vector<int> kDefaultLayerDims{2848, 512, 64, 4, 64, 512, 2848};

struct Layer {
    Matrix weight; // out x in
    Vector bias;   // out

    friend bool operator==(const Layer& a, const Layer& b)
    {
        return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols()
               && a.bias.size() == b.bias.size() && a.weight == b.weight && a.bias == b.bias;
    }
};

struct ModelParams {
    std::vector<int> layer_dims;
    std::vector<Layer> layers;
    // Bumped by every parameter update; forward caches record it so a
    // backward pass against a modified model is rejected.
    std::uint64_t generation = 0;

    int input_dim() const { return layer_dims.front(); }
    int bottleneck() const { return layer_dims[layer_dims.size() / 2]; }

    std::size_t parameter_count() const
    {
        std::size_t n = 0;
        for (const auto& l : layers) {
            n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
        }
        return n;
    }

    friend bool operator==(const ModelParams& a, const ModelParams& b)
    {
        return a.layer_dims == b.layer_dims && a.layers == b.layers;
    }
};

struct HyperParams {
    int batch_size = 128;
    double learning_rate = 1e-5;
    double dropout_ratio = 0.5;
    double weight_decay = 1e-5;
    int epochs = 2;
    std::uint64_t seed = 0;
    // Dropout is applied only after hidden activations at least this wide,
    // which keeps the bottleneck code intact.
    int dropout_min_width = 64;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const
    {
        if (batch_size < 1) {
            throw InvalidArgument("batch_size must be >= 1");
        }
        if (!(dropout_ratio >= 0.0 && dropout_ratio < 1.0)) {
            throw InvalidArgument("dropout_ratio must be in [0, 1)");
        }
        if (epochs < 1) {
            throw InvalidArgument("epochs must be >= 1");
        }
        if (!(learning_rate > 0.0) || !(weight_decay >= 0.0)) {
            throw InvalidArgument("learning_rate must be > 0 and weight_decay >= 0");
        }
    }

    friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

/// Palindromic, with widths strictly decreasing into a single bottleneck.
inline void validate_layer_dims(const std::vector<int>& dims)
{
    const auto n = dims.size();
    if (n < 3 || n % 2 == 0) {
        throw InvalidArgument("layer_dims must have an odd length >= 3");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (dims[i] < 1) {
            throw InvalidArgument("layer widths must be >= 1");
        }
        if (dims[i] != dims[n - 1 - i]) {
            throw InvalidArgument("layer_dims are not symmetric");
        }
    }
    for (std::size_t i = 0; i < n / 2; ++i) {
        if (dims[i] <= dims[i + 1]) {
            throw InvalidArgument("layer_dims must narrow strictly toward the bottleneck");
        }
    }
}

/// He-uniform weights, U(-sqrt(6/fan_in), sqrt(6/fan_in)); zero biases.
inline ModelParams init_model(const std::vector<int>& dims, std::uint64_t seed)
{
    validate_layer_dims(dims);
    Rng rng(seed);
    ModelParams m;
    m.layer_dims = dims;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const int in = dims[l];
        const int out = dims[l + 1];
        const double limit = std::sqrt(6.0 / in);
        Layer layer{Matrix(out, in), Vector::Zero(out)};
        for (int r = 0; r < out; ++r) {
            for (int c = 0; c < in; ++c) {
                layer.weight(r, c) = rng.uniform(-limit, limit);
            }
        }
        m.layers.push_back(std::move(layer));
    }
    return m;
}

/// A model of the right shape with every parameter zero.
inline ModelParams zero_model(const std::vector<int>& dims)
{
    validate_layer_dims(dims);
    ModelParams m;
    m.layer_dims = dims;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        m.layers.push_back({Matrix::Zero(dims[l + 1], dims[l]), Vector::Zero(dims[l + 1])});
    }
    return m;
}

inline void check_shapes(const ModelParams& m)
{
    validate_layer_dims(m.layer_dims);
    if (m.layers.size() + 1 != m.layer_dims.size()) {
        throw InvalidArgument("layer count does not match layer_dims");
    }
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const auto& L = m.layers[l];
        if (L.weight.rows() != m.layer_dims[l + 1] || L.weight.cols() != m.layer_dims[l]
            || L.bias.size() != m.layer_dims[l + 1]) {
            throw InvalidArgument("layer " + std::to_string(l) + " shape does not match layer_dims");
        }
    }
}

enum class Mode { train, eval };

/// Activations retained by a forward pass for the matching backward pass.
struct ForwardCache {
    SparseColumns input;
    std::vector<Matrix> pre;   // affine outputs per layer
    std::vector<Matrix> post;  // activations after ReLU (where applied) and dropout
    std::vector<Matrix> masks; // scaled keep masks; empty where no dropout
    Mode mode = Mode::eval;
    std::uint64_t generation = 0;
    bool valid = false;

    const Matrix& output() const { return post.back(); }
};

namespace detail {

/// Layer l (0-based) has no ReLU: it is the output or the code layer.
inline bool is_linear(const ModelParams& m, std::size_t layer)
{
    const auto nl = m.layers.size();
    return layer + 1 == nl || layer + 1 == nl / 2;
}

inline bool drops_after(const ModelParams& m, std::size_t layer, const HyperParams& hp)
{
    const bool hidden = layer + 1 < m.layers.size();
    return hidden && hp.dropout_ratio > 0.0 && m.layer_dims[layer + 1] >= hp.dropout_min_width;
}

} // namespace detail

/// Batched forward over sparse input columns. In train mode `rng` draws
/// the dropout masks and must be non-null; eval mode is deterministic.
inline ForwardCache forward_batch(const ModelParams& m, SparseColumns input, Mode mode,
                                  const HyperParams& hp = {}, Rng* rng = nullptr)
{
    if (input.rows() != m.input_dim()) {
        throw InvalidArgument("forward: input length " + std::to_string(input.rows())
                              + " != model input " + std::to_string(m.input_dim()));
    }
    if (mode == Mode::train && rng == nullptr && hp.dropout_ratio > 0.0) {
        throw InvalidArgument("forward: train mode needs a generator for dropout");
    }
    ForwardCache c;
    c.mode = mode;
    c.generation = m.generation;
    const auto nl = m.layers.size();
    c.pre.resize(nl);
    c.post.resize(nl);
    c.masks.resize(nl);
    const double keep = 1.0 - hp.dropout_ratio;
    for (std::size_t l = 0; l < nl; ++l) {
        const auto& L = m.layers[l];
        Matrix& z = c.pre[l];
        if (l == 0) {
            z.noalias() = L.weight * input;
        } else {
            z.noalias() = L.weight * c.post[l - 1];
        }
        z.colwise() += L.bias;
        if (l + 1 == nl) {
            c.post[l] = z;
            break;
        }
        if (detail::is_linear(m, l)) {
            c.post[l] = z;
        } else {
            c.post[l] = z.cwiseMax(0.0);
        }
        if (mode == Mode::train && detail::drops_after(m, l, hp)) {
            Matrix& mask = c.masks[l];
            mask.resize(z.rows(), z.cols());
            for (Eigen::Index j = 0; j < mask.cols(); ++j) {
                for (Eigen::Index i = 0; i < mask.rows(); ++i) {
                    mask(i, j) = rng->uniform() < keep ? 1.0 / keep : 0.0;
                }
            }
            c.post[l].array() *= mask.array();
        }
    }
    c.input = std::move(input);
    c.valid = true;
    return c;
}

inline ForwardCache forward(const ModelParams& m, const Vector& input, Mode mode,
                            const HyperParams& hp = {}, Rng* rng = nullptr)
{
    if (input.size() != m.input_dim()) {
        throw InvalidArgument("forward: input length " + std::to_string(input.size())
                              + " != model input " + std::to_string(m.input_dim()));
    }
    SparseColumns col = Matrix(input).sparseView(0.0, 0.0);
    return forward_batch(m, std::move(col), mode, hp, rng);
}

/// Mean element-wise squared error.
inline double reconstruction_error(const Vector& in, const Vector& out)
{
    if (in.size() != out.size() || in.size() == 0) {
        throw InvalidArgument("reconstruction_error: length mismatch");
    }
    return (in - out).squaredNorm() / static_cast<double>(in.size());
}

/// Columns per evaluation chunk. Short chunks are zero-padded to this
/// width so every column goes through identically shaped products and a
/// flow's output does not depend on its batch neighbours.
inline constexpr Eigen::Index kEvalChunk = 64;

/// Eval-mode pass over all columns; `sink(j, input_col, output_col)` is
/// called once per column in order.
template <typename Sink>
void eval_columns(const ModelParams& m, const SparseColumns& data, Sink&& sink)
{
    if (data.rows() != m.input_dim()) {
        throw InvalidArgument("eval: input length " + std::to_string(data.rows())
                              + " != model input " + std::to_string(m.input_dim()));
    }
    for (Eigen::Index start = 0; start < data.cols(); start += kEvalChunk) {
        const Eigen::Index len = std::min<Eigen::Index>(kEvalChunk, data.cols() - start);
        SparseColumns block(data.rows(), kEvalChunk);
        block.middleCols(0, len) = data.middleCols(start, len);
        const auto c = forward_batch(m, std::move(block), Mode::eval);
        const Matrix in = Matrix(c.input);
        for (Eigen::Index j = 0; j < len; ++j) {
            sink(start + j, in.col(j), c.output().col(j));
        }
    }
}

/// Eval-mode reconstruction errors for every column, in order.
inline std::vector<double> reconstruction_errors(const ModelParams& m, const SparseColumns& data)
{
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(data.cols()));
    eval_columns(m, data, [&](Eigen::Index, const auto& in, const auto& o) {
        out.push_back(reconstruction_error(in, o));
    });
    return out;
}

/// Eval-mode reconstruction of one vector (same numerics as
/// reconstruction_errors).
inline Vector reconstruct(const ModelParams& m, const Vector& input)
{
    if (input.size() != m.input_dim()) {
        throw InvalidArgument("reconstruct: input length mismatch");
    }
    SparseColumns col = Matrix(input).sparseView(0.0, 0.0);
    Vector out;
    eval_columns(m, col, [&](Eigen::Index, const auto&, const auto& o) { out = o; });
    return out;
}

struct Gradients {
    std::vector<Layer> layers;
};

/// Gradients of the batch loss mean_b(E(x_b, out_b)) for the cached
/// forward pass; the target is the cached input itself.
inline Gradients backward(const ModelParams& m, const ForwardCache& c)
{
    if (!c.valid || c.post.size() != m.layers.size()) {
        throw InvalidArgument("backward: missing forward cache");
    }
    if (c.generation != m.generation) {
        throw InvalidArgument("backward: forward cache is stale (model was updated)");
    }
    const auto nl = m.layers.size();
    const double batch = static_cast<double>(c.input.cols());
    const double n = static_cast<double>(m.input_dim());
    Gradients g;
    g.layers.resize(nl);

    Matrix delta = (c.output() - Matrix(c.input)) * (2.0 / (n * batch));
    for (std::size_t l = nl; l-- > 0;) {
        auto& gl = g.layers[l];
        if (l == 0) {
            gl.weight.noalias() = delta * c.input.transpose();
        } else {
            gl.weight.noalias() = delta * c.post[l - 1].transpose();
        }
        gl.bias = delta.rowwise().sum();
        if (l == 0) {
            break;
        }
        Matrix back = m.layers[l].weight.transpose() * delta;
        if (!detail::is_linear(m, l - 1)) {
            back.array() *= (c.pre[l - 1].array() > 0.0).cast<double>();
        }
        if (c.masks[l - 1].size() != 0) {
            back.array() *= c.masks[l - 1].array();
        }
        delta = std::move(back);
    }
    return g;
}

/// Convenience overload: the `target` must be the vector the cache was
/// computed from (autoencoder objective).
inline Gradients backward(const ModelParams& m, const ForwardCache& c, const Vector& target)
{
    if (c.valid && (c.input.cols() != 1 || target.size() != c.input.rows()
                    || (Matrix(c.input).col(0) - target).cwiseAbs().maxCoeff() != 0.0)) {
        throw InvalidArgument("backward: target is not the cached input");
    }
    return backward(m, c);
}

struct OptimizerState {
    std::vector<Layer> first;  // first moment
    std::vector<Layer> second; // second moment
    std::uint64_t step = 0;

    static OptimizerState for_model(const ModelParams& m)
    {
        OptimizerState s;
        for (const auto& l : m.layers) {
            s.first.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()),
                               Vector::Zero(l.bias.size())});
        }
        s.second = s.first;
        return s;
    }
};

/// One Adam update with bias correction. L2 decay enters the weight
/// gradients as weight_decay * w; biases are not decayed.
inline void adam_step(ModelParams& m, const Gradients& g, OptimizerState& s, const HyperParams& hp)
{
    if (g.layers.size() != m.layers.size()) {
        throw InvalidArgument("adam_step: gradient layer count mismatch");
    }
    if (s.first.empty()) {
        s = OptimizerState::for_model(m);
    }
    if (s.first.size() != m.layers.size()) {
        throw InvalidArgument("adam_step: optimizer state layer count mismatch");
    }
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const auto& L = m.layers[l];
        const auto& G = g.layers[l];
        if (G.weight.rows() != L.weight.rows() || G.weight.cols() != L.weight.cols()
            || G.bias.size() != L.bias.size() || s.first[l].weight.rows() != L.weight.rows()
            || s.first[l].weight.cols() != L.weight.cols()) {
            throw InvalidArgument("adam_step: shape mismatch at layer " + std::to_string(l));
        }
    }
    ++s.step;
    const double t = static_cast<double>(s.step);
    const double c1 = 1.0 - std::pow(hp.beta1, t);
    const double c2 = 1.0 - std::pow(hp.beta2, t);
    const double b1 = hp.beta1;
    const double b2 = hp.beta2;
    const double lr = hp.learning_rate;
    const double eps = hp.epsilon;

    auto update = [&](auto&& w, const auto& grad, auto&& mom1, auto&& mom2, double decay) {
        auto wa = w.array();
        auto m1 = mom1.array();
        auto m2 = mom2.array();
        if (decay != 0.0) {
            const auto gd = (grad.array() + decay * wa).eval();
            m1 = b1 * m1 + (1.0 - b1) * gd;
            m2 = b2 * m2 + (1.0 - b2) * gd.square();
        } else {
            m1 = b1 * m1 + (1.0 - b1) * grad.array();
            m2 = b2 * m2 + (1.0 - b2) * grad.array().square();
        }
        wa -= lr * (m1 / c1) / ((m2 / c2).sqrt() + eps);
    };
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        update(m.layers[l].weight, g.layers[l].weight, s.first[l].weight, s.second[l].weight,
               hp.weight_decay);
        update(m.layers[l].bias, g.layers[l].bias, s.first[l].bias, s.second[l].bias, 0.0);
    }
    ++m.generation;
}

struct TrainReport {
    std::vector<double> step_loss;  // mean batch loss before each update
    std::vector<double> epoch_loss; // mean of step losses per epoch
};

struct TrainResult {
    ModelParams model;
    TrainReport report;
};

/// Mini-batch training. Each epoch reshuffles with the "shuffle" sub-seed;
/// dropout draws from the "dropout" sub-seed. The final partial batch is
/// kept.
inline TrainResult train(ModelParams model, const SparseColumns& data, const HyperParams& hp)
{
    hp.validate();
    check_shapes(model);
    if (data.cols() == 0) {
        throw InvalidArgument("train: empty dataset");
    }
    if (data.rows() != model.input_dim()) {
        throw InvalidArgument("train: dataset rows do not match model input");
    }
    Rng shuffle_rng(derive_seed(hp.seed, "shuffle"));
    Rng dropout_rng(derive_seed(hp.seed, "dropout"));
    OptimizerState state = OptimizerState::for_model(model);
    TrainReport report;

    std::vector<int> order(static_cast<std::size_t>(data.cols()));
    std::iota(order.begin(), order.end(), 0);
    const double n = static_cast<double>(data.rows());

    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        shuffle_rng.shuffle(order.begin(), order.end());
        double sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
            const std::size_t len = std::min<std::size_t>(hp.batch_size, order.size() - start);
            SparseColumns batch(data.rows(), static_cast<Eigen::Index>(len));
            batch.reserve(Eigen::VectorXi::Constant(static_cast<int>(len), 32));
            for (std::size_t j = 0; j < len; ++j) {
                for (SparseColumns::InnerIterator it(data, order[start + j]); it; ++it) {
                    batch.insert(it.row(), static_cast<Eigen::Index>(j)) = it.value();
                }
            }
            batch.makeCompressed();
            const auto cache = forward_batch(model, std::move(batch), Mode::train, hp, &dropout_rng);
            const double loss = (cache.output() - Matrix(cache.input)).squaredNorm()
                                / (n * static_cast<double>(len));
            const auto grads = backward(model, cache);
            adam_step(model, grads, state, hp);
            report.step_loss.push_back(loss);
            sum += loss;
            ++batches;
        }
        report.epoch_loss.push_back(sum / static_cast<double>(batches));
    }
    return {std::move(model), std::move(report)};
}

} // namespace flowae

#endif
