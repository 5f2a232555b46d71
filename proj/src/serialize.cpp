#include "seedex/serialize.hpp"

#include "seedex/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace seedex::io {

using models::Activation;
using models::Pooling;

namespace {

const char* pooling_name(Pooling p) { return p == Pooling::mean ? "mean" : "attention"; }
const char* activation_name(Activation a) { return a == Activation::tanh ? "tanh" : "identity"; }

template <class T>
void read_field(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

Json to_json(const models::TrainConfig& c) {
  return Json{{"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size},
              {"epochs", c.epochs},
              {"dropout", c.dropout},
              {"embedding_dim", c.embedding_dim},
              {"hidden_dim", c.hidden_dim},
              {"buckets", c.buckets},
              {"pooling", pooling_name(c.pooling)},
              {"activation", activation_name(c.activation)},
              {"embedding_init_scale", c.embedding_init_scale},
              {"pretrain_seed", c.pretrain_seed},
              {"l2", c.l2},
              {"max_iter", c.max_iter},
              {"tolerance", c.tolerance},
              {"fit_intercept", c.fit_intercept}};
}

models::TrainConfig train_config_from_json(const Json& j, const models::TrainConfig& base) {
  if (!j.is_object()) throw ConfigError("training config must be a JSON object");
  const Json known = to_json(base);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown training config field '" + key + "'");
  }
  models::TrainConfig c = base;
  read_field(j, "learning_rate", c.learning_rate);
  read_field(j, "batch_size", c.batch_size);
  read_field(j, "epochs", c.epochs);
  read_field(j, "dropout", c.dropout);
  read_field(j, "embedding_dim", c.embedding_dim);
  read_field(j, "hidden_dim", c.hidden_dim);
  read_field(j, "buckets", c.buckets);
  read_field(j, "embedding_init_scale", c.embedding_init_scale);
  read_field(j, "pretrain_seed", c.pretrain_seed);
  read_field(j, "l2", c.l2);
  read_field(j, "max_iter", c.max_iter);
  read_field(j, "tolerance", c.tolerance);
  read_field(j, "fit_intercept", c.fit_intercept);
  std::string name;
  if (j.contains("pooling")) {
    read_field(j, "pooling", name);
    if (name == "mean") c.pooling = Pooling::mean;
    else if (name == "attention") c.pooling = Pooling::attention;
    else throw ConfigError("pooling must be 'mean' or 'attention', got '" + name + "'");
  }
  if (j.contains("activation")) {
    read_field(j, "activation", name);
    if (name == "tanh") c.activation = Activation::tanh;
    else if (name == "identity") c.activation = Activation::identity;
    else throw ConfigError("activation must be 'tanh' or 'identity', got '" + name + "'");
  }
  return c;
}

Json to_json(const models::LogRegModel& m) {
  return Json{{"kind", "logreg"},
              {"registry_version", m.registry_version},
              {"coefficients", m.coefficients},
              {"intercept", m.intercept},
              {"mean", m.mean},
              {"scale", m.scale},
              {"config_digest", m.config_digest},
              {"iterations", m.iterations},
              {"gradient_norm", m.gradient_norm}};
}

models::LogRegModel logreg_from_json(const Json& j) {
  try {
    if (j.at("kind") != "logreg") throw ModelError("not a logistic regression model");
    models::LogRegModel m;
    m.registry_version = j.at("registry_version").get<std::string>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.intercept = j.at("intercept").get<double>();
    m.mean = j.at("mean").get<std::vector<double>>();
    m.scale = j.at("scale").get<std::vector<double>>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.iterations = j.at("iterations").get<std::size_t>();
    m.gradient_norm = j.at("gradient_norm").get<double>();
    if (m.mean.size() != m.coefficients.size() || m.scale.size() != m.coefficients.size()) {
      throw ModelError("coefficient, mean and scale lengths differ");
    }
    return m;
  } catch (const Json::exception& e) {
    throw ModelError(std::string("malformed logistic regression model: ") + e.what());
  }
}

Json to_json(const models::NeuralModel& m) {
  const auto& p = m.params;
  return Json{{"kind", "neural"},
              {"seed", m.seed},
              {"config", to_json(m.config)},
              {"config_digest", m.config_digest},
              {"buckets", p.buckets},
              {"dim", p.dim},
              {"hidden", p.hidden},
              {"embedding", p.embedding},
              {"attention", p.attention},
              {"w_hidden", p.w_hidden},
              {"b_hidden", p.b_hidden},
              {"w_out", p.w_out},
              {"b_out", p.b_out}};
}

models::NeuralModel neural_from_json(const Json& j) {
  try {
    if (j.at("kind") != "neural") throw ModelError("not a neural model");
    models::NeuralModel m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = train_config_from_json(j.at("config"));
    m.config_digest = j.at("config_digest").get<std::string>();
    m.params = models::NeuralParams::zeros(j.at("buckets").get<std::size_t>(),
                                           j.at("dim").get<std::size_t>(),
                                           j.at("hidden").get<std::size_t>());
    auto fill = [&](const char* key, std::vector<double>& dst) {
      auto v = j.at(key).get<std::vector<double>>();
      if (v.size() != dst.size()) throw ModelError(std::string("wrong size for ") + key);
      dst = std::move(v);
    };
    fill("embedding", m.params.embedding);
    fill("attention", m.params.attention);
    fill("w_hidden", m.params.w_hidden);
    fill("b_hidden", m.params.b_hidden);
    fill("w_out", m.params.w_out);
    fill("b_out", m.params.b_out);
    return m;
  } catch (const Json::exception& e) {
    throw ModelError(std::string("malformed neural model: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw ParseError(static_cast<std::size_t>(line), path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_file(path, j.dump(1) + "\n");
}

}  // namespace seedex::io
