#include <algorithm>
#include <cctype>
#include <cmath>

#include "brd/error.hpp"
#include "brd/models.hpp"
#include "layers.hpp"
#include "workspace.hpp"

namespace brd {

using detail::CellKind;

std::string_view to_string(Architecture a) noexcept {
  switch (a) {
    case Architecture::BiRnn: return "bi-rnn";
    case Architecture::BiLstm: return "bi-lstm";
    case Architecture::McnnLstm: return "mcnn-lstm";
  }
  return "bi-lstm";
}

std::string_view display_name(Architecture a) noexcept {
  switch (a) {
    case Architecture::BiRnn: return "Bi-RNN";
    case Architecture::BiLstm: return "Bi-LSTM";
    case Architecture::McnnLstm: return "MCNN-LSTM";
  }
  return "Bi-LSTM";
}

Architecture parse_architecture(std::string_view s) {
  std::string key;
  for (char c : s) {
    if (c == '-' || c == '_') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "birnn") return Architecture::BiRnn;
  if (key == "bilstm") return Architecture::BiLstm;
  if (key == "mcnnlstm" || key == "mcnn") return Architecture::McnnLstm;
  throw Error(ErrorKind::Config, "unknown model '" + std::string(s) +
                                     "' (expected bi-rnn, bi-lstm or mcnn-lstm)");
}

ModelConfig ModelConfig::defaults(Architecture a, int input_dim) {
  ModelConfig c;
  c.architecture = a;
  c.input_dim = input_dim;
  c.sequence_length = input_dim;
  return c;
}

bool operator==(const ModelConfig& a, const ModelConfig& b) noexcept {
  return a.architecture == b.architecture && a.input_dim == b.input_dim &&
         a.kernel_sizes == b.kernel_sizes && a.conv_filters == b.conv_filters &&
         a.pool_size == b.pool_size && a.hidden_units == b.hidden_units &&
         a.sequence_length == b.sequence_length;
}

void ModelConfig::validate() const {
  const auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
  if (input_dim < 1) fail("input_dim must be >= 1");
  if (sequence_length < 1) fail("sequence_length must be >= 1");
  if (input_dim % sequence_length != 0) {
    fail("sequence_length " + std::to_string(sequence_length) + " does not divide input_dim " +
         std::to_string(input_dim));
  }
  if (hidden_units < 1) fail("hidden_units must be >= 1");
  if (architecture != Architecture::McnnLstm) return;
  if (conv_filters < 1) fail("conv_filters must be >= 1");
  if (pool_size < 1) fail("pool_size must be >= 1");
  for (int k : kernel_sizes) {
    if (k < 1) fail("kernel sizes must be >= 1");
    if (k >= sequence_length) {
      fail("kernel size " + std::to_string(k) + " must be smaller than sequence_length " +
           std::to_string(sequence_length));
    }
    if ((sequence_length - k + 1) / pool_size < 1) {
      fail("pool_size " + std::to_string(pool_size) + " leaves no steps after kernel " + std::to_string(k));
    }
  }
}

std::vector<std::vector<float>> reshape_embedding(std::span<const float> v, const ModelConfig& config) {
  if (config.sequence_length < 1 || v.size() % static_cast<std::size_t>(config.sequence_length) != 0) {
    throw Error(ErrorKind::Config, "sequence_length " + std::to_string(config.sequence_length) +
                                       " does not divide vector length " + std::to_string(v.size()));
  }
  const std::size_t width = v.size() / static_cast<std::size_t>(config.sequence_length);
  std::vector<std::vector<float>> steps;
  steps.reserve(static_cast<std::size_t>(config.sequence_length));
  for (std::size_t t = 0; t < static_cast<std::size_t>(config.sequence_length); ++t) {
    steps.emplace_back(v.begin() + static_cast<std::ptrdiff_t>(t * width),
                       v.begin() + static_cast<std::ptrdiff_t>((t + 1) * width));
  }
  return steps;
}

// ---------------------------------------------------------------- FeatureTable

ModelInput FeatureTable::input(std::size_t row) const {
  ModelInput in;
  in.count = static_cast<int>(std::min<std::size_t>(channels.size(), 3));
  for (int c = 0; c < in.count; ++c) {
    in.channel[c] = std::span<const float>(channels[c].data() + row * dim, dim);
  }
  return in;
}

void FeatureTable::append(std::span<const float> v, std::uint8_t label) {
  if (channels.empty()) channels.emplace_back();
  if (dim == 0) dim = v.size();
  if (v.size() != dim) {
    throw Error(ErrorKind::Config, "feature row has " + std::to_string(v.size()) + " values, expected " +
                                       std::to_string(dim));
  }
  for (auto& ch : channels) ch.insert(ch.end(), v.begin(), v.end());
  labels.push_back(label);
}

FeatureTable FeatureTable::subset(std::span<const std::size_t> rows) const {
  FeatureTable out;
  out.dim = dim;
  out.channels.resize(channels.size());
  for (std::size_t c = 0; c < channels.size(); ++c) {
    out.channels[c].reserve(rows.size() * dim);
    for (auto r : rows) {
      const auto first = channels[c].begin() + static_cast<std::ptrdiff_t>(r * dim);
      out.channels[c].insert(out.channels[c].end(), first, first + static_cast<std::ptrdiff_t>(dim));
    }
  }
  if (!labels.empty()) {
    for (auto r : rows) out.labels.push_back(labels[r]);
  }
  return out;
}

// ---------------------------------------------------------------- Network

struct Network::Layout {
  // Bidirectional heads.
  detail::Recurrent forward_cell;
  detail::Recurrent backward_cell;
  // MCNN-LSTM branches.
  std::array<detail::Conv1d, 3> conv{};
  std::array<detail::MaxPool, 3> pool{};
  std::array<detail::Recurrent, 3> branch_lstm{};
  std::array<std::size_t, 4> branch_offsets{};  // branch c spans [offsets[c], offsets[c+1])
  detail::Dense head;
  std::size_t size = 0;
};

Network::Network(ModelConfig config) : config_(config), layout_(std::make_unique<Layout>()) {
  config_.validate();
  auto& L = *layout_;
  const int H = config_.hidden_units;
  const int width = config_.feature_width();
  std::size_t off = 0;
  if (config_.architecture == Architecture::McnnLstm) {
    for (int c = 0; c < 3; ++c) {
      L.branch_offsets[c] = off;
      L.conv[c] = detail::Conv1d{width, config_.conv_filters, config_.kernel_sizes[c]};
      off = L.conv[c].place(off);
      L.pool[c] = detail::MaxPool{config_.pool_size};
      L.branch_lstm[c] = detail::Recurrent{CellKind::Lstm, config_.conv_filters, H};
      off = L.branch_lstm[c].place(off);
    }
    L.branch_offsets[3] = off;
    L.head = detail::Dense{3 * H};
  } else {
    const CellKind kind =
        config_.architecture == Architecture::BiRnn ? CellKind::Simple : CellKind::Lstm;
    L.forward_cell = detail::Recurrent{kind, width, H};
    off = L.forward_cell.place(off);
    L.backward_cell = detail::Recurrent{kind, width, H};
    off = L.backward_cell.place(off);
    L.head = detail::Dense{2 * H};
  }
  off = L.head.place(off);
  L.size = off;
  params_.assign(off, 0.0);
}

Network::Network(const Network& o)
    : config_(o.config_), params_(o.params_), layout_(std::make_unique<Layout>(*o.layout_)) {}
Network::Network(Network&&) noexcept = default;
Network& Network::operator=(Network&&) noexcept = default;
Network::~Network() = default;

Network& Network::operator=(const Network& o) {
  if (this != &o) {
    config_ = o.config_;
    params_ = o.params_;
    layout_ = std::make_unique<Layout>(*o.layout_);
  }
  return *this;
}

void Network::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto& L = *layout_;
  double* p = params_.data();
  if (config_.architecture == Architecture::McnnLstm) {
    for (int c = 0; c < 3; ++c) {
      L.conv[c].init(p, rng);
      L.branch_lstm[c].init(p, rng);
    }
  } else {
    L.forward_cell.init(p, rng);
    L.backward_cell.init(p, rng);
  }
  L.head.init(p, rng);
}

std::pair<std::size_t, std::size_t> Network::branch_parameters(int c) const {
  if (config_.architecture != Architecture::McnnLstm || c < 0 || c > 2) {
    throw Error(ErrorKind::Config, "branch parameters exist only for MCNN-LSTM branches 0..2");
  }
  const auto& o = layout_->branch_offsets;
  return {o[c], o[c + 1] - o[c]};
}

std::unique_ptr<Workspace> Network::make_workspace() const { return std::make_unique<Workspace>(); }

double Network::forward(const ModelInput& input, Workspace& ws) const {
  const auto& L = *layout_;
  const std::size_t dim = static_cast<std::size_t>(config_.input_dim);
  const int T = config_.sequence_length;
  const int channels = config_.input_channels();
  if (input.count != 1 && input.count != channels) {
    throw Error(ErrorKind::Config, std::string(display_name(config_.architecture)) + " takes " +
                                       std::to_string(channels) + " input(s), got " +
                                       std::to_string(input.count));
  }
  for (int c = 0; c < input.count; ++c) {
    if (input.channel[c].size() != dim) {
      throw Error(ErrorKind::Config, "input has dimension " + std::to_string(input.channel[c].size()) +
                                         ", model expects " + std::to_string(dim));
    }
  }
  const double* p = params_.data();
  const int H = config_.hidden_units;
  ws.channels_used = channels;

  if (config_.architecture != Architecture::McnnLstm) {
    auto src = input.at(0);
    ws.input[0].assign(src.begin(), src.end());
    L.forward_cell.forward(p, ws.input[0].data(), T, false, ws.fwd);
    L.backward_cell.forward(p, ws.input[0].data(), T, true, ws.bwd);
    ws.feat.resize(2 * static_cast<std::size_t>(H));
    std::copy_n(ws.fwd.h.data() + static_cast<std::size_t>(T) * H, H, ws.feat.data());
    std::copy_n(ws.bwd.h.data() + static_cast<std::size_t>(T) * H, H, ws.feat.data() + H);
  } else {
    ws.feat.resize(3 * static_cast<std::size_t>(H));
    const int F = config_.conv_filters;
    for (int c = 0; c < 3; ++c) {
      auto src = input.at(c);
      ws.input[c].assign(src.begin(), src.end());
      auto& br = ws.branch[c];
      const int conv_steps = L.conv[c].out_steps(T);
      const int pooled_steps = L.pool[c].out_steps(conv_steps);
      br.conv_out.resize(static_cast<std::size_t>(conv_steps) * F);
      br.pooled.resize(static_cast<std::size_t>(pooled_steps) * F);
      br.argmax.resize(br.pooled.size());
      L.conv[c].forward(p, ws.input[c].data(), T, br.conv_out.data());
      L.pool[c].forward(br.conv_out.data(), conv_steps, F, br.pooled.data(), br.argmax.data());
      L.branch_lstm[c].forward(p, br.pooled.data(), pooled_steps, false, br.lstm);
      std::copy_n(br.lstm.h.data() + static_cast<std::size_t>(pooled_steps) * H, H,
                  ws.feat.data() + static_cast<std::size_t>(c) * H);
    }
  }
  return L.head.forward(p, ws.feat.data());
}

void Network::backward(Workspace& ws, double dlogit, std::span<double> grad) const {
  const auto& L = *layout_;
  const double* p = params_.data();
  double* g = grad.data();
  const int T = config_.sequence_length;
  const int H = config_.hidden_units;
  ws.dfeat.resize(ws.feat.size());
  L.head.backward(p, ws.feat.data(), dlogit, g, ws.dfeat.data());

  if (config_.architecture != Architecture::McnnLstm) {
    L.forward_cell.backward(p, ws.input[0].data(), T, false, ws.fwd, ws.dfeat.data(), g, nullptr,
                            ws.scratch);
    L.backward_cell.backward(p, ws.input[0].data(), T, true, ws.bwd, ws.dfeat.data() + H, g, nullptr,
                             ws.scratch);
    return;
  }
  const int F = config_.conv_filters;
  for (int c = 0; c < 3; ++c) {
    auto& br = ws.branch[c];
    const int conv_steps = L.conv[c].out_steps(T);
    const int pooled_steps = L.pool[c].out_steps(conv_steps);
    br.dpooled.assign(br.pooled.size(), 0.0);
    L.branch_lstm[c].backward(p, br.pooled.data(), pooled_steps, false, br.lstm,
                              ws.dfeat.data() + static_cast<std::size_t>(c) * H, g, br.dpooled.data(),
                              ws.scratch);
    br.dconv.assign(br.conv_out.size(), 0.0);
    L.pool[c].backward(br.dpooled.data(), pooled_steps, F, br.argmax.data(), br.dconv.data());
    L.conv[c].backward(ws.input[c].data(), T, br.conv_out.data(), br.dconv.data(), g);
  }
}

double Network::probability(const ModelInput& input) const {
  Workspace ws;
  const double z = forward(input, ws);
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

std::vector<double> Network::features(const ModelInput& input) const {
  Workspace ws;
  forward(input, ws);
  return ws.feat;
}

Network build_model(const ModelConfig& config, std::uint64_t seed) {
  Network net(config);
  net.initialize(seed);
  return net;
}

}  // namespace brd
