#include <fstream>
#include <sstream>

#include <json.hpp>

#include "brd/error.hpp"
#include "brd/models.hpp"

namespace brd {

namespace {

constexpr const char* kFormat = "brd-checkpoint";
constexpr int kVersion = 1;

using nlohmann::json;

json to_json(const ModelConfig& c) {
  return {{"architecture", to_string(c.architecture)},
          {"input_dim", c.input_dim},
          {"kernel_sizes", c.kernel_sizes},
          {"conv_filters", c.conv_filters},
          {"pool_size", c.pool_size},
          {"hidden_units", c.hidden_units},
          {"sequence_length", c.sequence_length}};
}

ModelConfig model_config_from(const json& j) {
  ModelConfig c;
  c.architecture = parse_architecture(j.at("architecture").get<std::string>());
  c.input_dim = j.at("input_dim").get<int>();
  c.kernel_sizes = j.at("kernel_sizes").get<std::array<int, 3>>();
  c.conv_filters = j.at("conv_filters").get<int>();
  c.pool_size = j.at("pool_size").get<int>();
  c.hidden_units = j.at("hidden_units").get<int>();
  c.sequence_length = j.at("sequence_length").get<int>();
  return c;
}

json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},       {"batch_size", c.batch_size}, {"learning_rate", c.learning_rate},
          {"optimizer", c.optimizer}, {"loss", c.loss},             {"seed", c.seed},
          {"beta1", c.beta1},         {"beta2", c.beta2},           {"epsilon", c.epsilon}};
}

TrainConfig train_config_from(const json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.optimizer = j.at("optimizer").get<std::string>();
  c.loss = j.at("loss").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  return c;
}

}  // namespace

void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path) {
  json history = json::array();
  for (const auto& e : model.history) {
    history.push_back({{"train_loss", e.train_loss},
                       {"train_accuracy", e.train_accuracy},
                       {"val_loss", e.val_loss},
                       {"val_accuracy", e.val_accuracy}});
  }
  const auto params = model.network.parameters();
  const json doc = {{"format", kFormat},
                    {"version", kVersion},
                    {"model", to_json(model.config())},
                    {"train", to_json(model.train_config)},
                    {"has_validation", model.has_validation},
                    {"history", history},
                    {"metadata", model.metadata},
                    {"parameter_count", params.size()},
                    {"parameters", std::vector<double>(params.begin(), params.end())}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write checkpoint " + path.string());
  out << doc.dump() << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

TrainedModel load_checkpoint(const std::filesystem::path& path, std::optional<Architecture> expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open checkpoint " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Checkpoint, path.string() + ": not a checkpoint (" + e.what() + ")");
  }
  const auto where = path.string() + ": ";
  if (!doc.is_object() || doc.value("format", "") != kFormat) {
    throw Error(ErrorKind::Checkpoint, where + "not a brd checkpoint");
  }
  if (doc.value("version", -1) != kVersion) {
    throw Error(ErrorKind::Checkpoint, where + "unsupported checkpoint version " +
                                           doc.value("version", json(-1)).dump());
  }
  try {
    const ModelConfig cfg = model_config_from(doc.at("model"));
    if (expected && cfg.architecture != *expected) {
      throw Error(ErrorKind::Checkpoint, where + "holds a " + std::string(display_name(cfg.architecture)) +
                                             " model, expected " +
                                             std::string(display_name(*expected)));
    }
    Network net(cfg);
    const auto params = doc.at("parameters").get<std::vector<double>>();
    if (params.size() != net.parameter_count()) {
      throw Error(ErrorKind::Checkpoint, where + "has " + std::to_string(params.size()) +
                                             " parameters, architecture needs " +
                                             std::to_string(net.parameter_count()));
    }
    std::copy(params.begin(), params.end(), net.parameters().begin());

    TrainedModel m{std::move(net), train_config_from(doc.at("train")), {},
                   doc.at("has_validation").get<bool>(), {}};
    for (const auto& e : doc.at("history")) {
      m.history.push_back({e.at("train_loss").get<double>(), e.at("train_accuracy").get<double>(),
                           e.at("val_loss").get<double>(), e.at("val_accuracy").get<double>()});
    }
    m.metadata = doc.at("metadata").get<std::map<std::string, std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Checkpoint, where + "malformed checkpoint (" + e.what() + ")");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Checkpoint) throw;
    throw Error(ErrorKind::Checkpoint, where + e.what());
  }
}

}  // namespace brd
