// SPDX-License-Identifier: Apache-2.0
//
// rfiscope: antenna-array imaging and RFI/jamming anomaly detection
// Copyright (C) 2026 The rfiscope authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "rfiscope/autoencoder.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rfiscope/binary_io.hpp"
#include "rfiscope/errors.hpp"
#include "rfiscope/parallel.hpp"

namespace rfiscope {

namespace {

constexpr std::size_t kChunk = 8;
constexpr std::array<char, 8> kCheckpointMagic{'R', 'F', 'I', 'A', 'E', 'C', 'K', '\0'};
constexpr std::uint32_t kCheckpointVersion = 1;

struct ChunkForward {
    std::vector<Eigen::MatrixXd> inputs; // P of D x B
    std::vector<LstmForward> encoder;
    std::vector<LstmForward> decoder;
    std::vector<Eigen::MatrixXd> outputs; // decoder step order
    const std::vector<Eigen::MatrixXd>& code() const { return encoder.back().outputs; }
    const Eigen::MatrixXd& target(std::size_t t) const { return inputs[inputs.size() - 1 - t]; }
};

void check_sequence(const ModelConfig& cfg, const Eigen::MatrixXd& seq)
{
    if (static_cast<std::size_t>(seq.rows()) != cfg.input_dim ||
        static_cast<std::size_t>(seq.cols()) != cfg.sequence_len) {
        std::ostringstream msg;
        msg << "sequence is " << seq.rows() << "x" << seq.cols() << ", model expects "
            << cfg.input_dim << "x" << cfg.sequence_len << " (features x steps)";
        throw std::invalid_argument(msg.str());
    }
}

std::vector<Eigen::MatrixXd> stack_steps(const ModelConfig& cfg, std::span<const Eigen::MatrixXd> batch)
{
    const auto D = static_cast<Eigen::Index>(cfg.input_dim);
    const auto B = static_cast<Eigen::Index>(batch.size());
    std::vector<Eigen::MatrixXd> steps(cfg.sequence_len, Eigen::MatrixXd(D, B));
    for (Eigen::Index b = 0; b < B; ++b) {
        const auto& seq = batch[static_cast<std::size_t>(b)];
        check_sequence(cfg, seq);
        for (std::size_t t = 0; t < cfg.sequence_len; ++t)
            steps[t].col(b) = seq.col(static_cast<Eigen::Index>(t));
    }
    return steps;
}

ChunkForward forward_chunk(const AutoencoderModel& model, std::vector<Eigen::MatrixXd> inputs)
{
    ChunkForward fw;
    fw.inputs = std::move(inputs);
    const Parameters& p = model.params;

    const std::vector<Eigen::MatrixXd>* seq = &fw.inputs;
    for (const auto& layer : p.encoder) {
        fw.encoder.push_back(lstm_forward(layer, *seq));
        seq = &fw.encoder.back().outputs;
    }

    std::vector<Eigen::MatrixXd> reversed_code(fw.code().rbegin(), fw.code().rend());
    seq = &reversed_code;
    for (const auto& layer : p.decoder) {
        fw.decoder.push_back(lstm_forward(layer, *seq));
        seq = &fw.decoder.back().outputs;
    }

    fw.outputs.reserve(seq->size());
    for (const auto& h : *seq) {
        Eigen::MatrixXd y = p.proj_weight * h;
        y.colwise() += p.proj_bias;
        fw.outputs.push_back(std::move(y));
    }
    return fw;
}

bool penalised_step(const ModelConfig& cfg, std::size_t t)
{
    return !cfg.l1_last_only || t + 1 == cfg.sequence_len;
}

// Per-sequence squared error sum and code L1 for one chunk.
void chunk_statistics(const ModelConfig& cfg, const ChunkForward& fw, Eigen::VectorXd& sq_err,
                      Eigen::VectorXd& l1)
{
    const Eigen::Index B = fw.inputs.front().cols();
    sq_err = Eigen::VectorXd::Zero(B);
    l1 = Eigen::VectorXd::Zero(B);
    for (std::size_t t = 0; t < fw.outputs.size(); ++t)
        sq_err += (fw.outputs[t] - fw.target(t)).colwise().squaredNorm().transpose();
    const auto& code = fw.code();
    for (std::size_t t = 0; t < code.size(); ++t)
        if (penalised_step(cfg, t))
            l1 += code[t].cwiseAbs().colwise().sum().transpose();
}

// Gradient of (scale) * sum over the chunk of per-sequence loss terms.
void backward_chunk(const AutoencoderModel& model, const ChunkForward& fw, double scale,
                    Parameters& grads)
{
    const ModelConfig& cfg = model.config;
    const Parameters& p = model.params;
    const std::size_t P = fw.outputs.size();

    std::vector<Eigen::MatrixXd> d_top(P);
    const auto& top_hidden = fw.decoder.back().outputs;
    for (std::size_t t = 0; t < P; ++t) {
        const Eigen::MatrixXd d_out = (2.0 * scale) * (fw.outputs[t] - fw.target(t));
        grads.proj_weight.noalias() += d_out * top_hidden[t].transpose();
        grads.proj_bias.noalias() += d_out.rowwise().sum();
        d_top[t].noalias() = p.proj_weight.transpose() * d_out;
    }

    std::vector<Eigen::MatrixXd> d = std::move(d_top);
    for (std::size_t j = p.decoder.size(); j-- > 0;)
        d = lstm_backward(p.decoder[j], fw.decoder[j].cache, d, grads.decoder[j]);

    // Decoder step t consumed code step P-1-t.
    std::vector<Eigen::MatrixXd> d_code(d.rbegin(), d.rend());
    const auto& code = fw.code();
    const double l1_scale = cfg.alpha * scale;
    if (l1_scale != 0.0)
        for (std::size_t t = 0; t < P; ++t)
            if (penalised_step(cfg, t))
                d_code[t] += code[t].unaryExpr([l1_scale](double x) {
                    return x > 0.0 ? l1_scale : (x < 0.0 ? -l1_scale : 0.0);
                });

    d = std::move(d_code);
    for (std::size_t j = p.encoder.size(); j-- > 0;)
        d = lstm_backward(p.encoder[j], fw.encoder[j].cache, d, grads.encoder[j]);
}

std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

std::span<const Eigen::MatrixXd> chunk_of(std::span<const Eigen::MatrixXd> batch, std::size_t c)
{
    const std::size_t begin = c * kChunk;
    return batch.subspan(begin, std::min(kChunk, batch.size() - begin));
}

void write_tensor(std::ostream& os, std::span<const double> data, Eigen::Index rows, Eigen::Index cols)
{
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(rows));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(cols));
    for (double x : data)
        write_le<double>(os, x);
}

} // namespace

void ModelConfig::validate() const
{
    if (input_dim == 0)
        throw ConfigError("model input dimension must be positive");
    if (sequence_len == 0)
        throw ConfigError("model sequence length must be positive");
    if (encoder_hidden.empty() || decoder_hidden.empty())
        throw ConfigError("encoder and decoder need at least one LSTM layer each");
    for (auto h : encoder_hidden)
        if (h == 0)
            throw ConfigError("encoder layer width must be positive");
    for (auto h : decoder_hidden)
        if (h == 0)
            throw ConfigError("decoder layer width must be positive");
    if (!(alpha >= 0.0))
        throw ConfigError("sparsity weight alpha must be non-negative");
}

Parameters Parameters::zeros_like() const
{
    Parameters z;
    for (const auto& l : encoder)
        z.encoder.push_back(LstmLayerParams::zeros(l.input_dim(), l.hidden_dim()));
    for (const auto& l : decoder)
        z.decoder.push_back(LstmLayerParams::zeros(l.input_dim(), l.hidden_dim()));
    z.proj_weight = Eigen::MatrixXd::Zero(proj_weight.rows(), proj_weight.cols());
    z.proj_bias = Eigen::VectorXd::Zero(proj_bias.size());
    return z;
}

std::size_t Parameters::count() const
{
    std::size_t n = static_cast<std::size_t>(proj_weight.size() + proj_bias.size());
    for (const auto& l : encoder)
        n += l.parameter_count();
    for (const auto& l : decoder)
        n += l.parameter_count();
    return n;
}

std::vector<std::span<double>> Parameters::tensors()
{
    std::vector<std::span<double>> out;
    auto add = [&out](auto& m) { out.emplace_back(m.data(), static_cast<std::size_t>(m.size())); };
    for (auto& l : encoder) {
        add(l.W);
        add(l.U);
        add(l.b);
    }
    for (auto& l : decoder) {
        add(l.W);
        add(l.U);
        add(l.b);
    }
    add(proj_weight);
    add(proj_bias);
    return out;
}

std::vector<std::span<const double>> Parameters::tensors() const
{
    std::vector<std::span<const double>> out;
    for (auto s : const_cast<Parameters*>(this)->tensors())
        out.emplace_back(s.data(), s.size());
    return out;
}

Parameters& Parameters::operator+=(const Parameters& other)
{
    auto mine = tensors();
    const auto theirs = other.tensors();
    if (mine.size() != theirs.size())
        throw std::invalid_argument("parameter sets have different structure");
    for (std::size_t i = 0; i < mine.size(); ++i) {
        if (mine[i].size() != theirs[i].size())
            throw std::invalid_argument("parameter tensors have different sizes");
        for (std::size_t j = 0; j < mine[i].size(); ++j)
            mine[i][j] += theirs[i][j];
    }
    return *this;
}

bool Parameters::all_finite() const
{
    for (auto t : tensors())
        for (double x : t)
            if (!std::isfinite(x))
                return false;
    return true;
}

AutoencoderModel AutoencoderModel::create(const ModelConfig& config, std::uint64_t seed)
{
    config.validate();
    std::mt19937_64 rng(seed);
    AutoencoderModel model;
    model.config = config;

    std::size_t in = config.input_dim;
    for (auto h : config.encoder_hidden) {
        model.params.encoder.push_back(LstmLayerParams::random(in, h, rng));
        in = h;
    }
    for (auto h : config.decoder_hidden) {
        model.params.decoder.push_back(LstmLayerParams::random(in, h, rng));
        in = h;
    }

    const auto D = static_cast<Eigen::Index>(config.input_dim);
    const auto H = static_cast<Eigen::Index>(in);
    model.params.proj_weight.resize(D, H);
    std::uniform_real_distribution<double> dist(-1.0 / std::sqrt(static_cast<double>(H)),
                                                1.0 / std::sqrt(static_cast<double>(H)));
    for (Eigen::Index j = 0; j < H; ++j)
        for (Eigen::Index i = 0; i < D; ++i)
            model.params.proj_weight(i, j) = dist(rng);
    model.params.proj_bias = Eigen::VectorXd::Zero(D);
    return model;
}

Eigen::MatrixXd encode(const AutoencoderModel& model, const Eigen::MatrixXd& features)
{
    check_sequence(model.config, features);
    const auto steps = stack_steps(model.config, std::span<const Eigen::MatrixXd>(&features, 1));
    const std::vector<Eigen::MatrixXd>* seq = &steps;
    std::vector<Eigen::MatrixXd> out;
    for (const auto& layer : model.params.encoder) {
        out = lstm_forward(layer, *seq).outputs;
        seq = &out;
    }
    Eigen::MatrixXd code(static_cast<Eigen::Index>(model.config.code_dim()),
                         static_cast<Eigen::Index>(out.size()));
    for (std::size_t t = 0; t < out.size(); ++t)
        code.col(static_cast<Eigen::Index>(t)) = out[t].col(0);
    return code;
}

Eigen::MatrixXd decode(const AutoencoderModel& model, const Eigen::MatrixXd& code)
{
    if (static_cast<std::size_t>(code.rows()) != model.config.code_dim() || code.cols() == 0)
        throw std::invalid_argument("code does not match the model's code dimension");
    std::vector<Eigen::MatrixXd> seq;
    for (Eigen::Index t = code.cols(); t-- > 0;)
        seq.push_back(code.col(t));
    for (const auto& layer : model.params.decoder)
        seq = lstm_forward(layer, seq).outputs;

    Eigen::MatrixXd out(model.params.proj_weight.rows(), code.cols());
    for (std::size_t t = 0; t < seq.size(); ++t)
        out.col(static_cast<Eigen::Index>(t)) = model.params.proj_weight * seq[t].col(0) + model.params.proj_bias;
    return out;
}

Eigen::MatrixXd reconstruct(const AutoencoderModel& model, const Eigen::MatrixXd& features)
{
    return decode(model, encode(model, features)).rowwise().reverse();
}

LossResult loss(const AutoencoderModel& model, std::span<const Eigen::MatrixXd> batch)
{
    if (batch.empty())
        throw std::invalid_argument("loss needs a non-empty batch");
    const ModelConfig& cfg = model.config;
    const double pd = static_cast<double>(cfg.sequence_len * cfg.input_dim);

    LossResult res;
    for (std::size_t c = 0; c < chunk_count(batch.size()); ++c) {
        const ChunkForward fw = forward_chunk(model, stack_steps(cfg, chunk_of(batch, c)));
        Eigen::VectorXd sq, l1;
        chunk_statistics(cfg, fw, sq, l1);
        for (Eigen::Index b = 0; b < sq.size(); ++b) {
            res.reconstruction_part += sq(b);
            res.sparsity_part += cfg.alpha * l1(b);
            res.reconstruction_errors.push_back(sq(b) / pd);
            res.code_l1.push_back(l1(b));
        }
    }
    const double T = static_cast<double>(batch.size());
    res.reconstruction_part /= T;
    res.sparsity_part /= T;
    res.value = res.reconstruction_part + res.sparsity_part;
    return res;
}

std::vector<double> reconstruction_errors(const AutoencoderModel& model,
                                          std::span<const Eigen::MatrixXd> sequences,
                                          std::size_t workers)
{
    const ModelConfig& cfg = model.config;
    const double pd = static_cast<double>(cfg.sequence_len * cfg.input_dim);
    std::vector<double> errors(sequences.size());
    parallel_for(chunk_count(sequences.size()), workers, [&](std::size_t c) {
        const ChunkForward fw = forward_chunk(model, stack_steps(cfg, chunk_of(sequences, c)));
        Eigen::VectorXd sq, l1;
        chunk_statistics(cfg, fw, sq, l1);
        for (Eigen::Index b = 0; b < sq.size(); ++b)
            errors[c * kChunk + static_cast<std::size_t>(b)] = sq(b) / pd;
    });
    return errors;
}

Parameters backprop(const AutoencoderModel& model, std::span<const Eigen::MatrixXd> batch,
                    LossResult* loss_out, std::size_t workers)
{
    if (batch.empty())
        throw std::invalid_argument("backprop needs a non-empty batch");
    const ModelConfig& cfg = model.config;
    const double scale = 1.0 / static_cast<double>(batch.size());
    const std::size_t chunks = chunk_count(batch.size());

    std::vector<Parameters> chunk_grads(chunks);
    std::vector<Eigen::VectorXd> chunk_sq(chunks), chunk_l1(chunks);
    parallel_for(chunks, workers, [&](std::size_t c) {
        const ChunkForward fw = forward_chunk(model, stack_steps(cfg, chunk_of(batch, c)));
        chunk_statistics(cfg, fw, chunk_sq[c], chunk_l1[c]);
        chunk_grads[c] = model.params.zeros_like();
        backward_chunk(model, fw, scale, chunk_grads[c]);
    });

    Parameters grads = model.params.zeros_like();
    for (const auto& g : chunk_grads)
        grads += g;

    if (loss_out) {
        const double pd = static_cast<double>(cfg.sequence_len * cfg.input_dim);
        LossResult res;
        for (std::size_t c = 0; c < chunks; ++c)
            for (Eigen::Index b = 0; b < chunk_sq[c].size(); ++b) {
                res.reconstruction_part += chunk_sq[c](b);
                res.sparsity_part += cfg.alpha * chunk_l1[c](b);
                res.reconstruction_errors.push_back(chunk_sq[c](b) / pd);
                res.code_l1.push_back(chunk_l1[c](b));
            }
        res.reconstruction_part *= scale;
        res.sparsity_part *= scale;
        res.value = res.reconstruction_part + res.sparsity_part;
        *loss_out = std::move(res);
    }

    if (!grads.all_finite())
        throw TrainingFault("non-finite gradient encountered during backpropagation (batch of " +
                            std::to_string(batch.size()) + " sequences)");
    return grads;
}

void save_checkpoint(const std::filesystem::path& path, const AutoencoderModel& model,
                     const std::string& config_echo)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    const ModelConfig& cfg = model.config;

    os.write(kCheckpointMagic.data(), kCheckpointMagic.size());
    write_le<std::uint32_t>(os, kCheckpointVersion);
    write_le<std::uint64_t>(os, config_echo.size());
    os.write(config_echo.data(), static_cast<std::streamsize>(config_echo.size()));

    write_le<std::uint64_t>(os, cfg.input_dim);
    write_le<std::uint64_t>(os, cfg.sequence_len);
    write_le<double>(os, cfg.alpha);
    write_le<std::uint8_t>(os, cfg.l1_last_only ? 1 : 0);
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.encoder_hidden.size()));
    for (auto h : cfg.encoder_hidden)
        write_le<std::uint64_t>(os, h);
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.decoder_hidden.size()));
    for (auto h : cfg.decoder_hidden)
        write_le<std::uint64_t>(os, h);

    const Parameters& p = model.params;
    auto layer = [&os](const LstmLayerParams& l) {
        write_tensor(os, {l.W.data(), static_cast<std::size_t>(l.W.size())}, l.W.rows(), l.W.cols());
        write_tensor(os, {l.U.data(), static_cast<std::size_t>(l.U.size())}, l.U.rows(), l.U.cols());
        write_tensor(os, {l.b.data(), static_cast<std::size_t>(l.b.size())}, l.b.rows(), 1);
    };
    for (const auto& l : p.encoder)
        layer(l);
    for (const auto& l : p.decoder)
        layer(l);
    write_tensor(os, {p.proj_weight.data(), static_cast<std::size_t>(p.proj_weight.size())},
                 p.proj_weight.rows(), p.proj_weight.cols());
    write_tensor(os, {p.proj_bias.data(), static_cast<std::size_t>(p.proj_bias.size())},
                 p.proj_bias.rows(), 1);
    if (!os)
        throw std::runtime_error("write failed for " + path.string());
}

AutoencoderModel load_checkpoint(const std::filesystem::path& path, std::string* config_echo)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw FormatError("cannot open checkpoint " + path.string());
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kCheckpointMagic)
        throw FormatError(path.string() + " is not a checkpoint file");
    const auto version = read_le<std::uint32_t>(is);
    if (version != kCheckpointVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(version));
    const auto echo_len = read_le<std::uint64_t>(is);
    std::string echo(echo_len, '\0');
    if (!is.read(echo.data(), static_cast<std::streamsize>(echo_len)))
        throw FormatError("truncated checkpoint header");
    if (config_echo)
        *config_echo = echo;

    ModelConfig cfg;
    cfg.input_dim = read_le<std::uint64_t>(is);
    cfg.sequence_len = read_le<std::uint64_t>(is);
    cfg.alpha = read_le<double>(is);
    cfg.l1_last_only = read_le<std::uint8_t>(is) != 0;
    cfg.encoder_hidden.resize(read_le<std::uint32_t>(is));
    for (auto& h : cfg.encoder_hidden)
        h = read_le<std::uint64_t>(is);
    cfg.decoder_hidden.resize(read_le<std::uint32_t>(is));
    for (auto& h : cfg.decoder_hidden)
        h = read_le<std::uint64_t>(is);

    // Shapes come from the config; the per-tensor dims are a consistency check.
    AutoencoderModel model = AutoencoderModel::create(cfg, 0);
    auto read_into = [&is](Eigen::Ref<Eigen::MatrixXd> m) {
        const auto rows = read_le<std::uint32_t>(is);
        const auto cols = read_le<std::uint32_t>(is);
        if (rows != m.rows() || cols != m.cols())
            throw FormatError("checkpoint tensor shape does not match its config");
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                m(i, j) = read_le<double>(is);
    };
    auto read_layer = [&](LstmLayerParams& l) {
        read_into(l.W);
        read_into(l.U);
        read_into(l.b);
    };
    for (auto& l : model.params.encoder)
        read_layer(l);
    for (auto& l : model.params.decoder)
        read_layer(l);
    read_into(model.params.proj_weight);
    read_into(model.params.proj_bias);
    return model;
}

} // namespace rfiscope
