#pragma once

// Single-hidden-layer dense autoencoder trained with a masked reconstruction
// loss, used to fill missing panel cells. Rows are per-(country, year)
// indicator vectors.

#include "tssim/error.hpp"
#include "tssim/panel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace tssim {

enum class Activation { tanh, rectifier };

struct AutoencoderConfig {
    // Unset means max(1, input_dim / 2).
    std::optional<std::size_t> hidden_width;
    Activation activation = Activation::tanh;
    double learning_rate = 0.01;
    std::size_t epochs = 2000;
    std::size_t refinement_rounds = 5;
    std::uint64_t seed = 42;
    double init_scale = 0.1;

    std::size_t width_for(std::size_t input_dim) const {
        return hidden_width.value_or(std::max<std::size_t>(1, input_dim / 2));
    }

    void validate() const {
        if (hidden_width && *hidden_width == 0) {
            throw InvalidArgument("autoencoder: hidden_width must be positive");
        }
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
            throw InvalidArgument("autoencoder: learning_rate must be positive");
        }
        if (epochs == 0 || refinement_rounds == 0) {
            throw InvalidArgument("autoencoder: epochs and refinement_rounds must be positive");
        }
        if (!(init_scale > 0.0) || !std::isfinite(init_scale)) {
            throw InvalidArgument("autoencoder: init_scale must be positive");
        }
    }
};

/// Encoder maps input -> hidden, decoder hidden -> input (linear output).
struct AutoencoderModel {
    Eigen::MatrixXd encoder_weights; // hidden x input
    Eigen::VectorXd encoder_bias;    // hidden
    Eigen::MatrixXd decoder_weights; // input x hidden
    Eigen::VectorXd decoder_bias;    // input
    Activation activation = Activation::tanh;

    std::size_t input_dim() const { return static_cast<std::size_t>(encoder_weights.cols()); }
    std::size_t hidden_dim() const { return static_cast<std::size_t>(encoder_weights.rows()); }

    static AutoencoderModel zeros(std::size_t input_dim, std::size_t hidden, Activation act) {
        const auto d = static_cast<Eigen::Index>(input_dim);
        const auto h = static_cast<Eigen::Index>(hidden);
        return {Eigen::MatrixXd::Zero(h, d), Eigen::VectorXd::Zero(h), Eigen::MatrixXd::Zero(d, h),
                Eigen::VectorXd::Zero(d), act};
    }

    /// Weights uniform in [-init_scale, init_scale], biases zero. The draw is
    /// a fixed function of the seed.
    static AutoencoderModel random(std::size_t input_dim, const AutoencoderConfig& config) {
        auto m = zeros(input_dim, config.width_for(input_dim), config.activation);
        std::mt19937_64 rng(config.seed);
        auto draw = [&] {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            return (2.0 * u - 1.0) * config.init_scale;
        };
        for (Eigen::Index r = 0; r < m.encoder_weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.encoder_weights.cols(); ++c) {
                m.encoder_weights(r, c) = draw();
            }
        }
        for (Eigen::Index r = 0; r < m.decoder_weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.decoder_weights.cols(); ++c) {
                m.decoder_weights(r, c) = draw();
            }
        }
        return m;
    }

    bool all_finite() const {
        return encoder_weights.allFinite() && encoder_bias.allFinite() && decoder_weights.allFinite() &&
               decoder_bias.allFinite();
    }
};

namespace detail {

inline double activate(double z, Activation a) { return a == Activation::tanh ? std::tanh(z) : (z > 0.0 ? z : 0.0); }

// Derivative expressed through the activation output h.
inline double activate_grad(double z, double h, Activation a) {
    return a == Activation::tanh ? 1.0 - h * h : (z > 0.0 ? 1.0 : 0.0);
}

} // namespace detail

/// Batch forward pass; each row of `batch` is one sample. Returns the hidden
/// pre-activations, activations and reconstructions.
struct ForwardPass {
    Eigen::MatrixXd pre;    // samples x hidden
    Eigen::MatrixXd hidden; // samples x hidden
    Eigen::MatrixXd output; // samples x input
};

inline ForwardPass forward_batch(const AutoencoderModel& model, const Eigen::MatrixXd& batch) {
    if (static_cast<std::size_t>(batch.cols()) != model.input_dim()) {
        throw InvalidArgument("autoencoder: batch width " + std::to_string(batch.cols()) +
                              " does not match model input width " + std::to_string(model.input_dim()));
    }
    ForwardPass fp;
    fp.pre = batch * model.encoder_weights.transpose();
    fp.pre.rowwise() += model.encoder_bias.transpose();
    fp.hidden = fp.pre.unaryExpr([a = model.activation](double z) { return detail::activate(z, a); });
    fp.output = fp.hidden * model.decoder_weights.transpose();
    fp.output.rowwise() += model.decoder_bias.transpose();
    return fp;
}

inline Eigen::VectorXd forward(const AutoencoderModel& model, const Eigen::VectorXd& row) {
    if (static_cast<std::size_t>(row.size()) != model.input_dim()) {
        throw InvalidArgument("autoencoder: row width " + std::to_string(row.size()) +
                              " does not match model input width " + std::to_string(model.input_dim()));
    }
    Eigen::MatrixXd batch = row.transpose();
    return forward_batch(model, batch).output.row(0).transpose();
}

struct LossAndGradient {
    double loss = 0.0;
    AutoencoderModel gradient;
};

/// Mean squared reconstruction error over observed cells (mask == 1) and its
/// exact gradient with respect to every parameter.
inline LossAndGradient loss_and_gradient(const AutoencoderModel& model, const Eigen::MatrixXd& batch,
                                         const Eigen::MatrixXd& mask) {
    if (mask.rows() != batch.rows() || mask.cols() != batch.cols()) {
        throw InvalidArgument("autoencoder: mask shape does not match batch shape");
    }
    const double observed = mask.sum();
    if (!(observed > 0.0)) {
        throw InvalidArgument("autoencoder: mask has no observed cells");
    }
    const auto fp = forward_batch(model, batch);
    const Eigen::MatrixXd diff = (fp.output - batch).cwiseProduct(mask);

    LossAndGradient out;
    out.loss = diff.squaredNorm() / observed;
    const Eigen::MatrixXd d_output = diff * (2.0 / observed); // samples x input
    Eigen::MatrixXd d_hidden = d_output * model.decoder_weights; // samples x hidden
    for (Eigen::Index r = 0; r < d_hidden.rows(); ++r) {
        for (Eigen::Index c = 0; c < d_hidden.cols(); ++c) {
            d_hidden(r, c) *= detail::activate_grad(fp.pre(r, c), fp.hidden(r, c), model.activation);
        }
    }
    out.gradient.activation = model.activation;
    out.gradient.decoder_weights = d_output.transpose() * fp.hidden;
    out.gradient.decoder_bias = d_output.colwise().sum().transpose();
    out.gradient.encoder_weights = d_hidden.transpose() * batch;
    out.gradient.encoder_bias = d_hidden.colwise().sum().transpose();
    return out;
}

struct TrainingLogEntry {
    std::size_t round = 0;
    std::size_t epoch = 0;
    double loss = 0.0;
};

struct ImputationResult {
    IndicatorPanel panel;
    AutoencoderModel model;
    std::vector<TrainingLogEntry> log;
    // Masked loss after each training round (initial round first).
    std::vector<double> round_losses;
};

namespace detail {

inline void train_epochs(AutoencoderModel& model, const Eigen::MatrixXd& batch, const Eigen::MatrixXd& mask,
                         const AutoencoderConfig& config, std::size_t round, std::vector<TrainingLogEntry>& log) {
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        auto lg = loss_and_gradient(model, batch, mask);
        if (!std::isfinite(lg.loss)) {
            std::ostringstream msg;
            msg << "autoencoder: non-finite loss at round " << round << " epoch " << epoch
                << " (learning_rate=" << config.learning_rate << ")";
            throw NumericalError(msg.str());
        }
        log.push_back({round, epoch, lg.loss});
        model.encoder_weights -= config.learning_rate * lg.gradient.encoder_weights;
        model.encoder_bias -= config.learning_rate * lg.gradient.encoder_bias;
        model.decoder_weights -= config.learning_rate * lg.gradient.decoder_weights;
        model.decoder_bias -= config.learning_rate * lg.gradient.decoder_bias;
    }
}

} // namespace detail

/// Fills the missing cells of a standardized panel. Missing inputs start at 0,
/// the model is trained by full-batch gradient descent, and in each refinement
/// round the missing inputs are replaced with the current reconstruction
/// before training continues. Observed cells are copied through unchanged.
inline ImputationResult train_impute(const IndicatorPanel& panel, const AutoencoderConfig& config) {
    config.validate();
    const auto nc = panel.countries().size();
    const auto ni = panel.indicators().size();
    const auto ny = panel.years().size();
    if (ni == 0 || nc * ny == 0) {
        throw InvalidArgument("train_impute: empty panel");
    }
    for (std::size_t i = 0; i < ni; ++i) {
        bool any = false;
        for (std::size_t c = 0; c < nc && !any; ++c) {
            for (std::size_t t = 0; t < ny && !any; ++t) {
                any = panel.observed(c, i, t);
            }
        }
        if (!any) {
            throw InvalidArgument("train_impute: indicator " + panel.indicators()[i] + " has no observed cells");
        }
    }

    ImputationResult result{panel, AutoencoderModel::random(ni, config), {}, {}};
    if (panel.observed_count() == panel.cell_count()) {
        return result;
    }

    const auto rows = static_cast<Eigen::Index>(nc * ny);
    Eigen::MatrixXd batch = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(ni));
    Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(ni));
    for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t t = 0; t < ny; ++t) {
            const auto r = static_cast<Eigen::Index>(c * ny + t);
            for (std::size_t i = 0; i < ni; ++i) {
                if (auto v = panel.at(c, i, t)) {
                    batch(r, static_cast<Eigen::Index>(i)) = *v;
                    mask(r, static_cast<Eigen::Index>(i)) = 1.0;
                }
            }
        }
    }
    const Eigen::MatrixXd missing = Eigen::MatrixXd::Ones(rows, static_cast<Eigen::Index>(ni)) - mask;

    auto& model = result.model;
    for (std::size_t round = 0; round <= config.refinement_rounds; ++round) {
        if (round > 0) {
            const auto recon = forward_batch(model, batch).output;
            batch = batch.cwiseProduct(mask) + recon.cwiseProduct(missing);
        }
        detail::train_epochs(model, batch, mask, config, round, result.log);
        result.round_losses.push_back(loss_and_gradient(model, batch, mask).loss);
    }
    if (!model.all_finite()) {
        throw NumericalError("autoencoder: parameters became non-finite");
    }

    const auto recon = forward_batch(model, batch).output;
    auto cells = panel.cells();
    for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t t = 0; t < ny; ++t) {
            const auto r = static_cast<Eigen::Index>(c * ny + t);
            for (std::size_t i = 0; i < ni; ++i) {
                auto& cell = cells[panel.index(c, i, t)];
                if (!cell) {
                    cell = recon(r, static_cast<Eigen::Index>(i));
                }
            }
        }
    }
    result.panel = panel.with_cells(std::move(cells));
    return result;
}

} // namespace tssim
