#include "slacast/lstm.hpp"

#include "slacast/error.hpp"
#include "slacast/loss.hpp"
#include "slacast/rng.hpp"

#include <cmath>
#include <string>

namespace slacast {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

Index ix(std::size_t v) { return static_cast<Index>(v); }

// Activations of one layer for a batch of B windows over L steps. Column
// block t (B columns wide) holds step t; hidden/cell have an extra leading
// block for the zero initial state.
struct LayerTrace {
    MatrixXd input;   // D x (B*L)
    MatrixXd gates;   // 4H x (B*L), activated i, f, g, o
    MatrixXd cell;    // H x (B*(L+1))
    MatrixXd tanh_c;  // H x (B*L)
    MatrixXd hidden;  // H x (B*(L+1))
};

struct BatchTrace {
    std::vector<LayerTrace> layers;
    Eigen::RowVectorXd output;  // 1 x B
};

template <typename Block>
void sigmoid_inplace(Block&& block) {
    block = (1.0 + (-block.array()).exp()).inverse().matrix();
}

void run_layer(const LstmParams& params, std::size_t layer, std::size_t batch, std::size_t steps, LayerTrace& tr) {
    const std::size_t H = params.spec().hidden;
    const std::size_t D = params.layer_input(layer);
    const auto W = params.gates(layer);
    const auto bias = params.bias(layer);
    const Index B = ix(batch);

    tr.gates.noalias() = W.leftCols(ix(D)) * tr.input;
    tr.gates.colwise() += bias;
    tr.cell.setZero(ix(H), B * ix(steps + 1));
    tr.hidden.setZero(ix(H), B * ix(steps + 1));
    tr.tanh_c.resize(ix(H), B * ix(steps));
    const auto Wh = W.rightCols(ix(H));
    const Index h = ix(H);
    for (std::size_t t = 0; t < steps; ++t) {
        const Index col = ix(t) * B;
        auto z = tr.gates.middleCols(col, B);
        z.noalias() += Wh * tr.hidden.middleCols(col, B);
        sigmoid_inplace(z.topRows(2 * h));
        z.middleRows(2 * h, h) = z.middleRows(2 * h, h).array().tanh().matrix();
        sigmoid_inplace(z.bottomRows(h));
        auto c = tr.cell.middleCols(col + B, B);
        c = z.middleRows(h, h).cwiseProduct(tr.cell.middleCols(col, B)) +
            z.topRows(h).cwiseProduct(z.middleRows(2 * h, h));
        auto tc = tr.tanh_c.middleCols(col, B);
        tc = c.array().tanh().matrix();
        tr.hidden.middleCols(col + B, B) = z.bottomRows(h).cwiseProduct(tc);
    }
}

// Fills layer-0 inputs from `windows` rows and runs the whole stack.
template <typename FillInput>
void run_network(const LstmParams& params, std::size_t batch, FillInput&& fill, BatchTrace& trace) {
    const auto& spec = params.spec();
    const std::size_t L = spec.lookback;
    trace.layers.resize(spec.layers);
    trace.layers[0].input.resize(ix(spec.input_width), ix(batch * L));
    fill(trace.layers[0].input);
    for (std::size_t l = 0; l < spec.layers; ++l) {
        if (l > 0) trace.layers[l].input = trace.layers[l - 1].hidden.rightCols(ix(batch * L));
        run_layer(params, l, batch, L, trace.layers[l]);
    }
    const auto& top = trace.layers.back().hidden;
    trace.output = params.head_weights().transpose() * top.rightCols(ix(batch));
    trace.output.array() += params.head_bias();
}

void backprop(const LstmParams& params, std::size_t batch, const BatchTrace& trace, const Eigen::RowVectorXd& d_out,
              Eigen::VectorXd& grad) {
    const auto& spec = params.spec();
    const std::size_t L = spec.lookback;
    const Index B = ix(batch);
    const Index h = ix(spec.hidden);
    LstmParams g(spec);

    const auto& top = trace.layers.back().hidden;
    g.head_weights() = top.rightCols(B) * d_out.transpose();
    g.head_bias() = d_out.sum();

    // Gradient w.r.t. each step's hidden output of the current layer.
    MatrixXd d_hidden = MatrixXd::Zero(h, B * ix(L));
    d_hidden.rightCols(B) = params.head_weights() * d_out;

    MatrixXd d_gates(4 * h, B * ix(L));
    MatrixXd dh_next(h, B);
    MatrixXd dc_next(h, B);
    MatrixXd dh(h, B);
    MatrixXd dc(h, B);
    for (std::size_t layer = spec.layers; layer-- > 0;) {
        const auto& tr = trace.layers[layer];
        const auto W = params.gates(layer);
        const auto Wh = W.rightCols(h);
        const std::size_t D = params.layer_input(layer);
        dh_next.setZero();
        dc_next.setZero();
        for (std::size_t t = L; t-- > 0;) {
            const Index col = ix(t) * B;
            const auto z = tr.gates.middleCols(col, B);
            const auto i = z.topRows(h).array();
            const auto f = z.middleRows(h, h).array();
            const auto gg = z.middleRows(2 * h, h).array();
            const auto o = z.bottomRows(h).array();
            const auto tc = tr.tanh_c.middleCols(col, B).array();
            const auto c_prev = tr.cell.middleCols(col, B).array();

            dh = d_hidden.middleCols(col, B) + dh_next;
            dc.array() = dh.array() * o * (1.0 - tc * tc) + dc_next.array();
            auto dz = d_gates.middleCols(col, B);
            dz.topRows(h).array() = dc.array() * gg * i * (1.0 - i);
            dz.middleRows(h, h).array() = dc.array() * c_prev * f * (1.0 - f);
            dz.middleRows(2 * h, h).array() = dc.array() * i * (1.0 - gg * gg);
            dz.bottomRows(h).array() = dh.array() * tc * o * (1.0 - o);
            dc_next.array() = dc.array() * f;
            dh_next.noalias() = Wh.transpose() * dz;
        }
        auto gW = g.gates(layer);
        gW.leftCols(ix(D)).noalias() = d_gates * tr.input.transpose();
        gW.rightCols(h).noalias() = d_gates * tr.hidden.leftCols(B * ix(L)).transpose();
        g.bias(layer) = d_gates.rowwise().sum();
        if (layer > 0) d_hidden.noalias() = W.leftCols(ix(D)).transpose() * d_gates;
    }
    grad = std::move(g.flat());
}

void check_window(const LstmSpec& spec, Index rows, Index cols) {
    if (rows != ix(spec.lookback) || cols != ix(spec.input_width))
        throw DataError("shape-mismatch", "window is " + std::to_string(rows) + "x" + std::to_string(cols) +
                                              ", model expects " + std::to_string(spec.lookback) + "x" +
                                              std::to_string(spec.input_width));
}

}  // namespace

void LstmSpec::validate() const {
    if (input_width == 0 || hidden == 0 || layers == 0 || lookback == 0)
        throw ConfigError("invalid-lstm-spec", "input width, hidden units, layers and lookback must be >= 1");
}

std::size_t parameter_count(const LstmSpec& spec) {
    std::size_t n = 0;
    for (std::size_t l = 0; l < spec.layers; ++l) {
        const std::size_t d = l == 0 ? spec.input_width : spec.hidden;
        n += 4 * spec.hidden * (d + spec.hidden) + 4 * spec.hidden;
    }
    return n + spec.hidden + 1;
}

LstmParams::LstmParams(const LstmSpec& spec) : spec_(spec) {
    spec.validate();
    flat_ = Eigen::VectorXd::Zero(ix(parameter_count(spec)));
}

LstmParams LstmParams::random(const LstmSpec& spec, std::uint64_t seed) {
    LstmParams p(spec);
    const double bound = 1.0 / std::sqrt(static_cast<double>(spec.hidden));
    auto fill = [&](auto&& block, const std::string& name) {
        auto rng = Rng::stream(seed, name);
        for (Index j = 0; j < block.cols(); ++j)
            for (Index i = 0; i < block.rows(); ++i) block(i, j) = rng.uniform(-bound, bound);
    };
    for (std::size_t l = 0; l < spec.layers; ++l) {
        fill(p.gates(l), "lstm/gates/" + std::to_string(l));
        auto b = p.bias(l);
        fill(b, "lstm/bias/" + std::to_string(l));
    }
    auto hw = p.head_weights();
    fill(hw, "lstm/head/weights");
    auto rng = Rng::stream(seed, "lstm/head/bias");
    p.head_bias() = rng.uniform(-bound, bound);
    return p;
}

std::size_t LstmParams::layer_input(std::size_t layer) const { return layer == 0 ? spec_.input_width : spec_.hidden; }

std::size_t LstmParams::layer_offset(std::size_t layer) const {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l) off += 4 * spec_.hidden * (layer_input(l) + spec_.hidden) + 4 * spec_.hidden;
    return off;
}

Eigen::Map<Eigen::MatrixXd> LstmParams::gates(std::size_t layer) {
    return {flat_.data() + layer_offset(layer), ix(4 * spec_.hidden), ix(layer_input(layer) + spec_.hidden)};
}

Eigen::Map<const Eigen::MatrixXd> LstmParams::gates(std::size_t layer) const {
    return {flat_.data() + layer_offset(layer), ix(4 * spec_.hidden), ix(layer_input(layer) + spec_.hidden)};
}

Eigen::Map<Eigen::VectorXd> LstmParams::bias(std::size_t layer) {
    const std::size_t off = layer_offset(layer) + 4 * spec_.hidden * (layer_input(layer) + spec_.hidden);
    return {flat_.data() + off, ix(4 * spec_.hidden)};
}

Eigen::Map<const Eigen::VectorXd> LstmParams::bias(std::size_t layer) const {
    const std::size_t off = layer_offset(layer) + 4 * spec_.hidden * (layer_input(layer) + spec_.hidden);
    return {flat_.data() + off, ix(4 * spec_.hidden)};
}

Eigen::Map<Eigen::VectorXd> LstmParams::head_weights() {
    return {flat_.data() + flat_.size() - ix(spec_.hidden) - 1, ix(spec_.hidden)};
}

Eigen::Map<const Eigen::VectorXd> LstmParams::head_weights() const {
    return {flat_.data() + flat_.size() - ix(spec_.hidden) - 1, ix(spec_.hidden)};
}

double forward(const LstmParams& params, const Eigen::Ref<const Frame>& window) {
    const auto& spec = params.spec();
    check_window(spec, window.rows(), window.cols());
    BatchTrace trace;
    run_network(params, 1, [&](MatrixXd& x) { x = window.transpose(); }, trace);
    return trace.output[0];
}

std::vector<double> forward_batch(const LstmParams& params, const WindowSet& windows,
                                  std::span<const std::size_t> indices) {
    const auto& spec = params.spec();
    check_window(spec, ix(windows.lookback()), ix(windows.width()));
    std::vector<double> out(indices.size());
    constexpr std::size_t kChunk = 256;
    BatchTrace trace;
    for (std::size_t start = 0; start < indices.size(); start += kChunk) {
        const std::size_t n = std::min(kChunk, indices.size() - start);
        run_network(
            params, n,
            [&](MatrixXd& x) {
                for (std::size_t t = 0; t < spec.lookback; ++t)
                    for (std::size_t b = 0; b < n; ++b)
                        x.col(ix(t * n + b)) = windows.frame().row(ix(indices[start + b] + t)).transpose();
            },
            trace);
        for (std::size_t b = 0; b < n; ++b) out[start + b] = trace.output[ix(b)];
    }
    return out;
}

double objective(const LstmParams& params, const WindowSet& windows, std::span<const std::size_t> indices, double w,
                 double l2, Eigen::VectorXd* grad) {
    const auto& spec = params.spec();
    check_window(spec, ix(windows.lookback()), ix(windows.width()));
    const std::size_t n = indices.size();
    if (n == 0) throw DataError("no-samples", "objective over an empty batch");
    BatchTrace trace;
    run_network(
        params, n,
        [&](MatrixXd& x) {
            for (std::size_t t = 0; t < spec.lookback; ++t)
                for (std::size_t b = 0; b < n; ++b)
                    x.col(ix(t * n + b)) = windows.frame().row(ix(indices[b] + t)).transpose();
        },
        trace);
    double loss = 0.0;
    Eigen::RowVectorXd d_out(ix(n));
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t b = 0; b < n; ++b) {
        const double err = trace.output[ix(b)] - windows.target(indices[b]);
        loss += wmae(err, w);
        d_out[ix(b)] = wmae_grad(err, w) * inv_n;
    }
    loss *= inv_n;
    loss += l2 * params.flat().squaredNorm();
    if (grad != nullptr) {
        backprop(params, n, trace, d_out, *grad);
        if (l2 != 0.0) *grad += 2.0 * l2 * params.flat();
    }
    return loss;
}

}  // namespace slacast
