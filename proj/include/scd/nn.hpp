// Fully-connected Same/Split classifier, written out by hand: variance-scaled
// init, inverted dropout, weighted cross-entropy, backprop, Adam, early
// stopping, binary + JSON persistence, and finite-difference gradient checks.
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scd/common.hpp"
#include "scd/features.hpp"
#include "scd/linalg.hpp"

namespace scd {

enum class Activation : unsigned char { Relu = 0, Tanh = 1 };

inline Activation parse_activation(std::string_view s) {
    if (s == "relu") return Activation::Relu;
    if (s == "tanh") return Activation::Tanh;
    throw ConfigError("unknown activation '" + std::string(s) + "', expected relu or tanh");
}

inline const char* activation_name(Activation a) {
    return a == Activation::Tanh ? "tanh" : "relu";
}

struct Architecture {
    std::vector<std::size_t> layer_dims;  // input, hidden..., 2
    double dropout_p = 0.5;
    Activation activation = Activation::Relu;
};

// Three hidden layers, each about half the previous width: 613 gives
// [613, 307, 154, 77, 2].
inline std::vector<std::size_t> default_layer_dims(std::size_t input_dim) {
    std::vector<std::size_t> dims{input_dim};
    std::size_t h = input_dim;
    for (int i = 0; i < 3; ++i) {
        h = (h + 1) / 2;
        dims.push_back(h);
    }
    dims.push_back(2);
    return dims;
}

inline void validate_architecture(const Architecture& arch) {
    if (arch.layer_dims.size() < 2)
        throw ConfigError("architecture needs at least input and output layers");
    for (std::size_t d : arch.layer_dims)
        if (d < 1) throw ConfigError("layer dimensions must be >= 1");
    if (!(arch.dropout_p >= 0.0 && arch.dropout_p < 1.0))
        throw ConfigError("dropout probability must be in [0, 1)");
}

enum class WeightMode : unsigned char { InverseCount = 0, Uniform = 1, Explicit = 2 };

inline WeightMode parse_weight_mode(std::string_view s) {
    if (s == "inverse") return WeightMode::InverseCount;
    if (s == "uniform") return WeightMode::Uniform;
    if (s == "explicit") return WeightMode::Explicit;
    throw ConfigError("unknown class-weight mode '" + std::string(s) +
                      "', expected inverse, uniform or explicit");
}

inline const char* weight_mode_name(WeightMode m) {
    switch (m) {
        case WeightMode::InverseCount: return "inverse";
        case WeightMode::Uniform: return "uniform";
        default: return "explicit";
    }
}

struct ClassWeights {
    double same = 1.0;
    double split = 1.0;
    double of(Label l) const { return l == Label::Split ? split : same; }
};

struct Hyperparams {
    double learning_rate = 1e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::size_t batch_size = 256;
    std::size_t epochs = 20;
    std::size_t early_stop_patience = 3;  // epochs without val Split-F1 improvement
    std::uint64_t seed = 0;
    WeightMode weight_mode = WeightMode::InverseCount;
    ClassWeights explicit_weights;  // used only in explicit mode
};

inline void validate_hyperparams(const Hyperparams& hp) {
    // learning_rate 0 is allowed: it turns training into a no-op, which the
    // tests rely on.
    if (!(hp.learning_rate >= 0.0)) throw ConfigError("learning rate must be >= 0");
    if (hp.batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (!(hp.adam_beta1 >= 0.0 && hp.adam_beta1 < 1.0) ||
        !(hp.adam_beta2 >= 0.0 && hp.adam_beta2 < 1.0))
        throw ConfigError("Adam betas must be in [0, 1)");
    if (!(hp.adam_epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
    if (hp.weight_mode == WeightMode::Explicit &&
        (!(hp.explicit_weights.same > 0.0) || !(hp.explicit_weights.split > 0.0)))
        throw ConfigError("explicit class weights must be positive");
}

// Inverse-count weights are proportional to 1/|class| and normalized so the
// two weights sum to 2, keeping loss magnitudes comparable with uniform runs.
inline ClassWeights resolve_class_weights(const Hyperparams& hp, std::size_t n_same,
                                          std::size_t n_split) {
    switch (hp.weight_mode) {
        case WeightMode::Uniform: return {1.0, 1.0};
        case WeightMode::Explicit: return hp.explicit_weights;
        case WeightMode::InverseCount: break;
    }
    if (n_same == 0 || n_split == 0)
        throw ValidationError("inverse-count class weights need both classes in the training set; "
                              "counts are Same=" + std::to_string(n_same) +
                              " Split=" + std::to_string(n_split));
    const double raw_same = 1.0 / static_cast<double>(n_same);
    const double raw_split = 1.0 / static_cast<double>(n_split);
    const double scale = 2.0 / (raw_same + raw_split);
    return {raw_same * scale, raw_split * scale};
}

struct TrainMeta {
    std::uint64_t seed = 0;
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;
    WeightMode weight_mode = WeightMode::Uniform;
    double weight_same = 1.0;
    double weight_split = 1.0;
    // 0 until train() fills them in; kept finite so the JSON container can
    // hold them as plain numbers.
    double final_train_loss = 0.0;
    double best_val_split_f1 = 0.0;
};

struct Model {
    Architecture arch;
    std::vector<Matrix> weights;              // weights[l] has shape dims[l+1] x dims[l]
    std::vector<std::vector<double>> biases;  // biases[l] has length dims[l+1]
    Scaler scaler;                            // empty when trained on unscaled features
    TrainMeta meta;

    std::size_t input_dim() const { return arch.layer_dims.front(); }
    std::size_t n_layers() const { return weights.size(); }
};

// Zero-mean normal weights with variance 2/fan_in, biases zero.
inline Model init_model(const Architecture& arch, std::uint64_t seed) {
    validate_architecture(arch);
    Model model;
    model.arch = arch;
    model.meta.seed = seed;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < arch.layer_dims.size(); ++l) {
        const std::size_t fan_in = arch.layer_dims[l];
        const std::size_t fan_out = arch.layer_dims[l + 1];
        Matrix w(fan_out, fan_in);
        const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
        for (double& v : w.data) v = stddev * rng.normal();
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(fan_out, 0.0);
    }
    return model;
}

// Row-wise softmax in place, stabilized by max subtraction.
inline void softmax_rows(Matrix& m) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        auto row = m.row(r);
        double mx = row[0];
        for (double v : row) mx = std::max(mx, v);
        double sum = 0.0;
        for (double& v : row) {
            v = std::exp(v - mx);
            sum += v;
        }
        for (double& v : row) v /= sum;
    }
}

namespace detail {

inline void apply_activation(Matrix& m, Activation act) {
    if (act == Activation::Relu) {
        for (double& v : m.data) v = v > 0.0 ? v : 0.0;
    } else {
        for (double& v : m.data) v = std::tanh(v);
    }
}

// Inverted dropout: kept entries scaled by 1/(1-p), dropped entries zero.
// p == 0 draws nothing from the stream.
inline Matrix dropout_mask(std::size_t rows, std::size_t cols, double p, Rng* rng) {
    Matrix mask(rows, cols);
    if (p == 0.0 || rng == nullptr) {
        std::fill(mask.data.begin(), mask.data.end(), 1.0);
        return mask;
    }
    const double keep_scale = 1.0 / (1.0 - p);
    for (double& v : mask.data) v = rng->u01() >= p ? keep_scale : 0.0;
    return mask;
}

inline void multiply_elementwise(Matrix& a, const Matrix& b) {
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] *= b.data[i];
}

}  // namespace detail

// Deterministic forward pass without dropout. Input must already be scaled
// the way the training data was; see predict() for the raw-feature entry.
inline Matrix forward_infer(const Model& model, const Matrix& batch) {
    if (batch.cols != model.input_dim())
        throw ValidationError("batch has " + std::to_string(batch.cols) +
                              " features, model expects " + std::to_string(model.input_dim()));
    Matrix h = batch;
    for (std::size_t l = 0; l + 1 < model.n_layers(); ++l) {
        h = affine(h, model.weights[l], model.biases[l]);
        detail::apply_activation(h, model.arch.activation);
    }
    h = affine(h, model.weights.back(), model.biases.back());
    softmax_rows(h);
    return h;
}

// Weighted cross-entropy: mean over rows of w(label) * -log(p[label]), with
// the probability clamped at 1e-12. Scaling both weights by a common factor
// scales the loss by exactly that factor.
inline double loss(const Matrix& probs, std::span<const Label> labels, const ClassWeights& weights) {
    if (probs.rows != labels.size())
        throw ValidationError("probability rows (" + std::to_string(probs.rows) +
                              ") do not match label count (" + std::to_string(labels.size()) + ")");
    if (probs.cols != 2) throw ValidationError("expected 2 probability columns");
    double total = 0.0;
    for (std::size_t r = 0; r < probs.rows; ++r) {
        const double p = probs(r, labels[r] == Label::Split ? 1 : 0);
        total += weights.of(labels[r]) * -std::log(std::max(p, 1e-12));
    }
    return total / static_cast<double>(probs.rows);
}

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

// One forward/backward pass; returns the loss and fills `grads`. When
// `dropout_rng` is non-null and the architecture has dropout_p > 0, fresh
// inverted-dropout masks are drawn for the input and every hidden activation.
inline double loss_and_gradients(const Model& model, const Matrix& batch,
                                 std::span<const Label> labels, const ClassWeights& weights,
                                 Rng* dropout_rng, Gradients& grads) {
    if (batch.cols != model.input_dim())
        throw ValidationError("batch has " + std::to_string(batch.cols) +
                              " features, model expects " + std::to_string(model.input_dim()));
    if (batch.rows != labels.size())
        throw ValidationError("batch rows do not match label count");
    if (model.arch.layer_dims.back() != 2)
        throw ValidationError("loss needs a 2-unit output layer");

    const std::size_t n_layers = model.n_layers();
    const double p = model.arch.dropout_p;
    Rng* rng = p > 0.0 ? dropout_rng : nullptr;

    // Forward, caching post-dropout layer inputs and pre-dropout activations.
    std::vector<Matrix> inputs;       // inputs[l]: what layer l's affine consumed
    std::vector<Matrix> activations;  // activations[l]: act output of hidden layer l
    std::vector<Matrix> masks;        // masks[l]: dropout mask applied after activations[l]
    inputs.reserve(n_layers);

    Matrix in0 = batch;
    const Matrix mask0 = detail::dropout_mask(in0.rows, in0.cols, p, rng);
    detail::multiply_elementwise(in0, mask0);
    inputs.push_back(std::move(in0));

    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
        Matrix h = affine(inputs[l], model.weights[l], model.biases[l]);
        detail::apply_activation(h, model.arch.activation);
        activations.push_back(h);
        const Matrix mask = detail::dropout_mask(h.rows, h.cols, p, rng);
        detail::multiply_elementwise(h, mask);
        masks.push_back(mask);
        inputs.push_back(std::move(h));
    }
    Matrix probs = affine(inputs.back(), model.weights.back(), model.biases.back());
    softmax_rows(probs);
    const double batch_loss = loss(probs, labels, weights);

    // Backward. Softmax + weighted CE fold into delta = w/N * (p - onehot).
    grads.weights.assign(n_layers, Matrix());
    grads.biases.assign(n_layers, {});
    const double inv_n = 1.0 / static_cast<double>(batch.rows);
    Matrix delta = std::move(probs);
    for (std::size_t r = 0; r < delta.rows; ++r) {
        const double w = weights.of(labels[r]) * inv_n;
        delta(r, 0) = w * (delta(r, 0) - (labels[r] == Label::Same ? 1.0 : 0.0));
        delta(r, 1) = w * (delta(r, 1) - (labels[r] == Label::Split ? 1.0 : 0.0));
    }

    for (std::size_t l = n_layers; l-- > 0;) {
        grads.weights[l] = matmul_tn(delta, inputs[l]);
        grads.biases[l] = column_sums(delta);
        if (l == 0) break;
        Matrix upstream = matmul_nn(delta, model.weights[l]);
        detail::multiply_elementwise(upstream, masks[l - 1]);
        const Matrix& h = activations[l - 1];
        if (model.arch.activation == Activation::Relu) {
            for (std::size_t i = 0; i < upstream.data.size(); ++i)
                if (!(h.data[i] > 0.0)) upstream.data[i] = 0.0;
        } else {
            for (std::size_t i = 0; i < upstream.data.size(); ++i)
                upstream.data[i] *= 1.0 - h.data[i] * h.data[i];
        }
        delta = std::move(upstream);
    }
    return batch_loss;
}

struct ProbPair {
    double p_same = 0.5;
    double p_split = 0.5;
};

// Split iff p_split strictly exceeds the threshold; exact ties go to Same,
// the majority class.
inline Label classify(const ProbPair& p, double threshold = 0.5) {
    return p.p_split > threshold ? Label::Split : Label::Same;
}

// Inference on raw (unscaled) feature rows: applies the model's stored
// scaler, then runs the deterministic forward pass.
inline std::vector<ProbPair> predict(const Model& model, const Matrix& features) {
    Matrix input = features;
    if (!model.scaler.empty())
        for (std::size_t r = 0; r < input.rows; ++r) model.scaler.apply_row(input.row(r));
    const Matrix probs = forward_infer(model, input);
    std::vector<ProbPair> out(probs.rows);
    for (std::size_t r = 0; r < probs.rows; ++r) out[r] = {probs(r, 0), probs(r, 1)};
    return out;
}

struct EpochStats {
    std::size_t epoch = 0;  // 1-based
    double train_loss = std::numeric_limits<double>::quiet_NaN();
    double val_loss = std::numeric_limits<double>::quiet_NaN();
    double val_split_f1 = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
    Model model;
    std::vector<EpochStats> history;
};

namespace detail {

inline double split_f1_at_half(const Matrix& probs, std::span<const Label> labels) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t r = 0; r < probs.rows; ++r) {
        const bool predicted_split = probs(r, 1) > 0.5;
        const bool is_split = labels[r] == Label::Split;
        if (predicted_split && is_split) ++tp;
        else if (predicted_split && !is_split) ++fp;
        else if (!predicted_split && is_split) ++fn;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

struct AdamState {
    std::vector<Matrix> m_w, v_w;
    std::vector<std::vector<double>> m_b, v_b;
    std::size_t t = 0;

    explicit AdamState(const Model& model) {
        for (std::size_t l = 0; l < model.n_layers(); ++l) {
            m_w.emplace_back(model.weights[l].rows, model.weights[l].cols);
            v_w.emplace_back(model.weights[l].rows, model.weights[l].cols);
            m_b.emplace_back(model.biases[l].size(), 0.0);
            v_b.emplace_back(model.biases[l].size(), 0.0);
        }
    }

    void update(Model& model, const Gradients& grads, const Hyperparams& hp) {
        ++t;
        const double bc1 = 1.0 - std::pow(hp.adam_beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(hp.adam_beta2, static_cast<double>(t));
        auto step = [&](double& param, double g, double& m, double& v) {
            m = hp.adam_beta1 * m + (1.0 - hp.adam_beta1) * g;
            v = hp.adam_beta2 * v + (1.0 - hp.adam_beta2) * g * g;
            param -= hp.learning_rate * (m / bc1) / (std::sqrt(v / bc2) + hp.adam_epsilon);
        };
        for (std::size_t l = 0; l < model.n_layers(); ++l) {
            auto& w = model.weights[l].data;
            const auto& gw = grads.weights[l].data;
            for (std::size_t i = 0; i < w.size(); ++i) step(w[i], gw[i], m_w[l].data[i], v_w[l].data[i]);
            auto& b = model.biases[l];
            const auto& gb = grads.biases[l];
            for (std::size_t i = 0; i < b.size(); ++i) step(b[i], gb[i], m_b[l][i], v_b[l][i]);
        }
    }
};

}  // namespace detail

// Mini-batch training with Adam. Both datasets must already be scaled (or
// both unscaled) consistently; train() never touches model.scaler. The epoch
// shuffle and all dropout masks come from one stream seeded with hp.seed, so
// equal seeds give bitwise-equal results. Early stopping watches validation
// Split-F1 and restores the best checkpoint; an empty validation set
// disables it.
inline TrainResult train(Model model, const Dataset& train_ds, const Dataset& val_ds,
                         const Hyperparams& hp) {
    validate_hyperparams(hp);
    if (train_ds.rows() == 0) throw ValidationError("training set is empty");
    if (train_ds.features.cols != model.input_dim())
        throw ValidationError("training features have " + std::to_string(train_ds.features.cols) +
                              " columns, model expects " + std::to_string(model.input_dim()));
    if (val_ds.rows() > 0 && val_ds.features.cols != model.input_dim())
        throw ValidationError("validation features do not match model input width");
    if (model.arch.layer_dims.back() != 2)
        throw ValidationError("training needs a 2-unit output layer");

    const auto [n_same, n_split] = train_ds.class_counts();
    const ClassWeights weights = resolve_class_weights(hp, n_same, n_split);
    model.meta.seed = hp.seed;
    model.meta.weight_mode = hp.weight_mode;
    model.meta.weight_same = weights.same;
    model.meta.weight_split = weights.split;

    Rng rng(hp.seed);
    detail::AdamState adam(model);
    Gradients grads;
    TrainResult result;

    Model best = model;
    double best_f1 = -1.0;
    std::size_t best_epoch = 0;
    std::size_t stale_epochs = 0;
    const bool has_val = val_ds.rows() > 0;

    std::vector<std::size_t> order(train_ds.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += hp.batch_size, ++batch_index) {
            const std::size_t end = std::min(begin + hp.batch_size, order.size());
            const std::size_t rows = end - begin;
            Matrix batch(rows, train_ds.features.cols);
            std::vector<Label> labels(rows);
            for (std::size_t i = 0; i < rows; ++i) {
                const auto src = train_ds.features.row(order[begin + i]);
                std::copy(src.begin(), src.end(), batch.row(i).begin());
                labels[i] = train_ds.labels[order[begin + i]];
            }
            const double batch_loss =
                loss_and_gradients(model, batch, labels, weights, &rng, grads);
            if (!std::isfinite(batch_loss))
                throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_index));
            adam.update(model, grads, hp);
            epoch_loss_sum += batch_loss * static_cast<double>(rows);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = epoch_loss_sum / static_cast<double>(train_ds.rows());
        model.meta.final_train_loss = stats.train_loss;
        if (has_val) {
            const Matrix val_probs = forward_infer(model, val_ds.features);
            stats.val_loss = loss(val_probs, val_ds.labels, weights);
            stats.val_split_f1 = detail::split_f1_at_half(val_probs, val_ds.labels);
            if (stats.val_split_f1 > best_f1) {
                best_f1 = stats.val_split_f1;
                best = model;
                best_epoch = epoch;
                stale_epochs = 0;
            } else {
                ++stale_epochs;
            }
        }
        result.history.push_back(stats);
        model.meta.epochs_run = epoch;
        if (has_val && stale_epochs >= hp.early_stop_patience) break;
    }

    if (has_val && best_epoch > 0) {
        const std::size_t epochs_run = model.meta.epochs_run;
        const double final_loss = model.meta.final_train_loss;
        model = std::move(best);
        model.meta.epochs_run = epochs_run;
        model.meta.final_train_loss = final_loss;
        model.meta.best_epoch = best_epoch;
        model.meta.best_val_split_f1 = best_f1;
    } else {
        model.meta.best_epoch = model.meta.epochs_run;
    }
    result.model = std::move(model);
    return result;
}

// Max relative error between analytic and central-difference gradients over
// every parameter, with dropout off. Step 1e-5; relative error uses
// |a - n| / max(|a| + |n|, 1e-8).
inline double grad_check(const Model& model, const Matrix& batch, std::span<const Label> labels,
                         const ClassWeights& weights) {
    Gradients analytic;
    Model probe = model;
    probe.arch.dropout_p = 0.0;
    loss_and_gradients(probe, batch, labels, weights, nullptr, analytic);

    constexpr double step = 1e-5;
    Gradients scratch;
    double max_rel = 0.0;
    auto check_param = [&](double& param, double analytic_g) {
        const double saved = param;
        param = saved + step;
        const double up = loss_and_gradients(probe, batch, labels, weights, nullptr, scratch);
        param = saved - step;
        const double down = loss_and_gradients(probe, batch, labels, weights, nullptr, scratch);
        param = saved;
        const double numeric_g = (up - down) / (2.0 * step);
        const double rel = std::abs(analytic_g - numeric_g) /
                           std::max(std::abs(analytic_g) + std::abs(numeric_g), 1e-8);
        max_rel = std::max(max_rel, rel);
    };
    for (std::size_t l = 0; l < probe.n_layers(); ++l) {
        for (std::size_t i = 0; i < probe.weights[l].data.size(); ++i)
            check_param(probe.weights[l].data[i], analytic.weights[l].data[i]);
        for (std::size_t i = 0; i < probe.biases[l].size(); ++i)
            check_param(probe.biases[l][i], analytic.biases[l][i]);
    }
    return max_rel;
}

namespace detail {

inline void put_f64(std::string& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline double get_f64(std::string_view bytes, std::size_t& pos) {
    return std::bit_cast<double>(get_u64(bytes, pos));
}

}  // namespace detail

constexpr char kModelMagic[] = "SCDMDL01";

// Binary model container: magic, architecture, weights/biases in declared
// shape order, optional scaler, training metadata. Layout in FORMATS.md.
inline std::string serialize_model(const Model& model) {
    std::string out = kModelMagic;
    detail::put_u64(out, model.arch.layer_dims.size());
    for (std::size_t d : model.arch.layer_dims) detail::put_u64(out, d);
    detail::put_f64(out, model.arch.dropout_p);
    out += static_cast<char>(model.arch.activation);
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        for (double v : model.weights[l].data) detail::put_f64(out, v);
        for (double v : model.biases[l]) detail::put_f64(out, v);
    }
    out += static_cast<char>(model.scaler.empty() ? 0 : 1);
    if (!model.scaler.empty()) {
        detail::put_u64(out, model.scaler.offset);
        detail::put_u64(out, model.scaler.mean.size());
        for (double v : model.scaler.mean) detail::put_f64(out, v);
        for (double v : model.scaler.stddev) detail::put_f64(out, v);
    }
    detail::put_u64(out, model.meta.seed);
    detail::put_u64(out, model.meta.epochs_run);
    detail::put_u64(out, model.meta.best_epoch);
    out += static_cast<char>(model.meta.weight_mode);
    detail::put_f64(out, model.meta.weight_same);
    detail::put_f64(out, model.meta.weight_split);
    detail::put_f64(out, model.meta.final_train_loss);
    detail::put_f64(out, model.meta.best_val_split_f1);
    return out;
}

inline Model deserialize_model(std::string_view bytes, const std::string& origin) {
    if (bytes.size() < 8 || bytes.substr(0, 8) != kModelMagic)
        throw ParseError(origin + ": not a model file or unsupported version (expected " +
                         kModelMagic + ")");
    std::size_t pos = 8;
    try {
        Model model;
        const std::uint64_t n_dims = detail::get_u64(bytes, pos);
        if (n_dims < 2 || n_dims > 64) throw ParseError("implausible layer count");
        model.arch.layer_dims.resize(n_dims);
        for (auto& d : model.arch.layer_dims) d = detail::get_u64(bytes, pos);
        model.arch.dropout_p = detail::get_f64(bytes, pos);
        if (pos >= bytes.size()) throw ParseError("truncated");
        const auto act_byte = static_cast<unsigned char>(bytes[pos++]);
        if (act_byte > 1) throw ParseError("bad activation byte");
        model.arch.activation = static_cast<Activation>(act_byte);
        validate_architecture(model.arch);
        for (std::size_t l = 0; l + 1 < n_dims; ++l) {
            Matrix w(model.arch.layer_dims[l + 1], model.arch.layer_dims[l]);
            for (double& v : w.data) v = detail::get_f64(bytes, pos);
            std::vector<double> b(model.arch.layer_dims[l + 1]);
            for (double& v : b) v = detail::get_f64(bytes, pos);
            model.weights.push_back(std::move(w));
            model.biases.push_back(std::move(b));
        }
        if (pos >= bytes.size()) throw ParseError("truncated");
        const bool has_scaler = bytes[pos++] != 0;
        if (has_scaler) {
            model.scaler.offset = detail::get_u64(bytes, pos);
            const std::uint64_t n = detail::get_u64(bytes, pos);
            model.scaler.mean.resize(n);
            model.scaler.stddev.resize(n);
            for (double& v : model.scaler.mean) v = detail::get_f64(bytes, pos);
            for (double& v : model.scaler.stddev) v = detail::get_f64(bytes, pos);
        }
        model.meta.seed = detail::get_u64(bytes, pos);
        model.meta.epochs_run = detail::get_u64(bytes, pos);
        model.meta.best_epoch = detail::get_u64(bytes, pos);
        if (pos >= bytes.size()) throw ParseError("truncated");
        const auto mode_byte = static_cast<unsigned char>(bytes[pos++]);
        if (mode_byte > 2) throw ParseError("bad weight-mode byte");
        model.meta.weight_mode = static_cast<WeightMode>(mode_byte);
        model.meta.weight_same = detail::get_f64(bytes, pos);
        model.meta.weight_split = detail::get_f64(bytes, pos);
        model.meta.final_train_loss = detail::get_f64(bytes, pos);
        model.meta.best_val_split_f1 = detail::get_f64(bytes, pos);
        return model;
    } catch (const ParseError& e) {
        throw ParseError(origin + ": corrupt model file: " + e.what());
    }
}

inline void save_model(const Model& model, const std::filesystem::path& path) {
    write_file(path, serialize_model(model));
}

inline Model load_model(const std::filesystem::path& path) {
    return deserialize_model(read_file(path), path.string());
}

// JSON text variant of the same container, for interoperability.
inline nlohmann::json model_to_json(const Model& model) {
    nlohmann::json j;
    j["format"] = kModelMagic;
    j["architecture"] = {{"layer_dims", model.arch.layer_dims},
                         {"dropout_p", model.arch.dropout_p},
                         {"activation", activation_name(model.arch.activation)}};
    j["layers"] = nlohmann::json::array();
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        j["layers"].push_back({{"rows", model.weights[l].rows},
                               {"cols", model.weights[l].cols},
                               {"weights", model.weights[l].data},
                               {"biases", model.biases[l]}});
    }
    if (!model.scaler.empty())
        j["scaler"] = {{"offset", model.scaler.offset},
                       {"mean", model.scaler.mean},
                       {"stddev", model.scaler.stddev}};
    j["meta"] = {{"seed", model.meta.seed},
                 {"epochs_run", model.meta.epochs_run},
                 {"best_epoch", model.meta.best_epoch},
                 {"weight_mode", weight_mode_name(model.meta.weight_mode)},
                 {"weight_same", model.meta.weight_same},
                 {"weight_split", model.meta.weight_split},
                 {"final_train_loss", model.meta.final_train_loss},
                 {"best_val_split_f1", model.meta.best_val_split_f1}};
    return j;
}

inline Model model_from_json(const nlohmann::json& j, const std::string& origin) {
    try {
        if (j.at("format").get<std::string>() != kModelMagic)
            throw ParseError("unsupported format tag");
        Model model;
        const auto& arch = j.at("architecture");
        model.arch.layer_dims = arch.at("layer_dims").get<std::vector<std::size_t>>();
        model.arch.dropout_p = arch.at("dropout_p").get<double>();
        model.arch.activation = parse_activation(arch.at("activation").get<std::string>());
        validate_architecture(model.arch);
        for (const auto& layer : j.at("layers")) {
            Matrix w(layer.at("rows").get<std::size_t>(), layer.at("cols").get<std::size_t>());
            const auto values = layer.at("weights").get<std::vector<double>>();
            if (values.size() != w.data.size()) throw ParseError("weight count mismatch");
            w.data = values;
            model.weights.push_back(std::move(w));
            model.biases.push_back(layer.at("biases").get<std::vector<double>>());
        }
        if (model.n_layers() + 1 != model.arch.layer_dims.size())
            throw ParseError("layer count does not match architecture");
        for (std::size_t l = 0; l < model.n_layers(); ++l) {
            if (model.weights[l].rows != model.arch.layer_dims[l + 1] ||
                model.weights[l].cols != model.arch.layer_dims[l] ||
                model.biases[l].size() != model.arch.layer_dims[l + 1])
                throw ParseError("layer shape does not match architecture");
        }
        if (j.contains("scaler")) {
            model.scaler.offset = j["scaler"].at("offset").get<std::size_t>();
            model.scaler.mean = j["scaler"].at("mean").get<std::vector<double>>();
            model.scaler.stddev = j["scaler"].at("stddev").get<std::vector<double>>();
        }
        const auto& meta = j.at("meta");
        model.meta.seed = meta.at("seed").get<std::uint64_t>();
        model.meta.epochs_run = meta.at("epochs_run").get<std::size_t>();
        model.meta.best_epoch = meta.at("best_epoch").get<std::size_t>();
        model.meta.weight_mode = parse_weight_mode(meta.at("weight_mode").get<std::string>());
        model.meta.weight_same = meta.at("weight_same").get<double>();
        model.meta.weight_split = meta.at("weight_split").get<double>();
        model.meta.final_train_loss = meta.at("final_train_loss").get<double>();
        model.meta.best_val_split_f1 = meta.at("best_val_split_f1").get<double>();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": corrupt model JSON: " + e.what());
    }
}

inline void save_model_json(const Model& model, const std::filesystem::path& path) {
    write_file(path, model_to_json(model).dump(2) + "\n");
}

inline Model load_model_json(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return model_from_json(j, path.string());
}

}  // namespace scd
