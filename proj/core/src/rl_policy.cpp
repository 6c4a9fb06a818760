#include "raceduel/rl_policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace raceduel {

using nlohmann::json;

namespace {

constexpr const char* kFormatName = "raceduel-policy";

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

json norms_to_json(const NormalizationConstants& n) {
  return {{"track_length", n.track_length},
          {"lateral", n.lateral},
          {"velocity", n.velocity},
          {"acceleration", n.acceleration},
          {"heading", n.heading},
          {"gap", n.gap},
          {"relative_velocity", n.relative_velocity},
          {"relative_lateral", n.relative_lateral}};
}

NormalizationConstants norms_from_json(const json& j) {
  NormalizationConstants n;
  n.track_length = j.at("track_length").get<double>();
  n.lateral = j.at("lateral").get<double>();
  n.velocity = j.at("velocity").get<double>();
  n.acceleration = j.at("acceleration").get<double>();
  n.heading = j.at("heading").get<double>();
  n.gap = j.at("gap").get<double>();
  n.relative_velocity = j.at("relative_velocity").get<double>();
  n.relative_lateral = j.at("relative_lateral").get<double>();
  return n;
}

json bounds_to_json(const ActionBounds& b) {
  return {{"lateral", b.lateral},
          {"lateral_velocity", b.lateral_velocity},
          {"lateral_acceleration", b.lateral_acceleration},
          {"v_max", b.v_max}};
}

ActionBounds bounds_from_json(const json& j) {
  ActionBounds b;
  b.lateral = j.at("lateral").get<double>();
  b.lateral_velocity = j.at("lateral_velocity").get<double>();
  b.lateral_acceleration = j.at("lateral_acceleration").get<double>();
  b.v_max = j.at("v_max").get<double>();
  return b;
}

}  // namespace

std::vector<std::size_t> PolicyWeights::architecture() const {
  std::vector<std::size_t> arch;
  if (layers.empty()) return arch;
  arch.push_back(layers.front().inputs);
  for (const auto& l : layers) arch.push_back(l.outputs);
  return arch;
}

void PolicyWeights::validate() const {
  if (layers.empty()) throw std::invalid_argument("policy has no layers");
  if (layers.front().inputs != kStateDim) throw std::invalid_argument("policy input must be 12-dim");
  if (layers.back().outputs != kActionDim) throw std::invalid_argument("policy output must be 4-dim");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const DenseLayer& l = layers[i];
    if (l.weights.size() != l.inputs * l.outputs || l.bias.size() != l.outputs) {
      throw std::invalid_argument("layer " + std::to_string(i) + " shape mismatch");
    }
    if (i > 0 && layers[i - 1].outputs != l.inputs) {
      throw std::invalid_argument("layer " + std::to_string(i) + " does not chain");
    }
    const auto finite = [](double x) { return std::isfinite(x); };
    if (!std::all_of(l.weights.begin(), l.weights.end(), finite) ||
        !std::all_of(l.bias.begin(), l.bias.end(), finite)) {
      throw std::invalid_argument("layer " + std::to_string(i) + " has non-finite values");
    }
  }
  if (!(bounds.lateral > 0.0) || !(bounds.v_max > 0.0) || bounds.lateral_velocity < 0.0 ||
      bounds.lateral_acceleration < 0.0) {
    throw std::invalid_argument("invalid action bounds");
  }
}

PolicyWeights PolicyWeights::parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("policy file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.value("format", std::string(kFormatName)) != kFormatName) {
      throw std::runtime_error("unexpected policy file format");
    }
    if (doc.value("activation", std::string("tanh")) != "tanh") {
      throw std::runtime_error("only tanh activations are supported");
    }
    const auto arch = doc.at("architecture").get<std::vector<std::size_t>>();
    const json& jl = doc.at("layers");
    if (arch.size() != jl.size() + 1) {
      throw std::runtime_error("architecture does not match the layer count");
    }
    PolicyWeights w;
    for (std::size_t i = 0; i < jl.size(); ++i) {
      DenseLayer layer;
      layer.inputs = arch[i];
      layer.outputs = arch[i + 1];
      const auto rows = jl[i].at("w").get<std::vector<std::vector<double>>>();
      if (rows.size() != layer.outputs) throw std::runtime_error("weight row count mismatch");
      layer.weights.reserve(layer.inputs * layer.outputs);
      for (const auto& row : rows) {
        if (row.size() != layer.inputs) throw std::runtime_error("weight column count mismatch");
        layer.weights.insert(layer.weights.end(), row.begin(), row.end());
      }
      layer.bias = jl[i].at("b").get<std::vector<double>>();
      w.layers.push_back(std::move(layer));
    }
    if (doc.contains("norms")) w.norms = norms_from_json(doc.at("norms"));
    if (doc.contains("action_bounds")) w.bounds = bounds_from_json(doc.at("action_bounds"));
    if (doc.contains("metadata")) w.metadata_json = doc.at("metadata").dump();
    w.validate();
    return w;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed policy file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("invalid policy file: ") + e.what());
  }
}

PolicyWeights PolicyWeights::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open policy file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string PolicyWeights::to_json_text() const {
  json doc;
  doc["format"] = kFormatName;
  doc["architecture"] = architecture();
  doc["activation"] = "tanh";
  doc["output_activation"] = "tanh";
  json jl = json::array();
  for (const auto& l : layers) {
    json rows = json::array();
    for (std::size_t r = 0; r < l.outputs; ++r) {
      rows.push_back(std::vector<double>(l.weights.begin() + static_cast<long>(r * l.inputs),
                                         l.weights.begin() + static_cast<long>((r + 1) * l.inputs)));
    }
    jl.push_back({{"w", rows}, {"b", l.bias}});
  }
  doc["layers"] = jl;
  doc["norms"] = norms_to_json(norms);
  doc["action_bounds"] = bounds_to_json(bounds);
  doc["metadata"] = json::parse(metadata_json);
  return doc.dump();
}

void PolicyWeights::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write policy file " + path);
  out << to_json_text() << '\n';
}

PolicyWeights PolicyWeights::zeros(std::span<const std::size_t> architecture) {
  PolicyWeights w;
  for (std::size_t i = 0; i + 1 < architecture.size(); ++i) {
    DenseLayer l;
    l.inputs = architecture[i];
    l.outputs = architecture[i + 1];
    l.weights.assign(l.inputs * l.outputs, 0.0);
    l.bias.assign(l.outputs, 0.0);
    w.layers.push_back(std::move(l));
  }
  return w;
}

MdpState build_state(const FrenetState& ego, const CurvilinearState& opponent,
                     const TrackModel& track, const NormalizationConstants& norms,
                     double opponent_sdot_noise) {
  const double ego_heading = ego.heading();
  const double opp_s_dot = longitudinal_velocity(opponent, track) + opponent_sdot_noise;
  const double opp_n_dot = lateral_velocity(opponent);

  MdpState st;
  auto& x = st.values;
  x[0] = ego.s / norms.track_length;
  x[1] = ego.s_dot / norms.velocity;
  x[2] = ego.s_ddot / norms.acceleration;
  x[3] = ego.n / norms.lateral;
  x[4] = ego.n_dot / norms.velocity;
  x[5] = ego.n_ddot / norms.acceleration;
  x[6] = ego_heading / norms.heading;
  x[7] = (ego.s - opponent.s) / norms.gap;
  x[8] = (ego.s_dot - opp_s_dot) / norms.relative_velocity;
  x[9] = (ego.n - opponent.n) / norms.relative_lateral;
  x[10] = (ego.n_dot - opp_n_dot) / norms.relative_velocity;
  x[11] = (ego_heading - opponent.chi) / norms.heading;
  for (double& v : x) v = clamp_unit(v);
  return st;
}

MdpAction forward(const MdpState& state, const PolicyWeights& weights) {
  std::vector<double> activ(state.values.begin(), state.values.end());
  std::vector<double> next;
  for (const DenseLayer& l : weights.layers) {
    if (activ.size() != l.inputs) throw std::invalid_argument("policy layer input size mismatch");
    next.assign(l.outputs, 0.0);
    for (std::size_t r = 0; r < l.outputs; ++r) {
      const double* row = l.weights.data() + r * l.inputs;
      double acc = l.bias[r];
      for (std::size_t c = 0; c < l.inputs; ++c) acc += row[c] * activ[c];
      next[r] = std::tanh(acc);
    }
    activ.swap(next);
  }
  if (activ.size() != kActionDim) throw std::invalid_argument("policy output must be 4-dim");
  MdpAction a;
  std::copy(activ.begin(), activ.end(), a.values.begin());
  return a;
}

EndState denormalize_action(const MdpAction& action, const ActionBounds& bounds) {
  const auto& a = action.values;
  EndState e;
  e.n = clamp_unit(a[0]) * bounds.lateral;
  e.n_dot = clamp_unit(a[1]) * bounds.lateral_velocity;
  e.n_ddot = clamp_unit(a[2]) * bounds.lateral_acceleration;
  e.s_dot = 0.5 * (clamp_unit(a[3]) + 1.0) * bounds.v_max;
  return e;
}

MdpAction normalize_action(const EndState& end, const ActionBounds& bounds) {
  MdpAction a;
  a.values[0] = bounds.lateral > 0.0 ? end.n / bounds.lateral : 0.0;
  a.values[1] = bounds.lateral_velocity > 0.0 ? end.n_dot / bounds.lateral_velocity : 0.0;
  a.values[2] = bounds.lateral_acceleration > 0.0 ? end.n_ddot / bounds.lateral_acceleration : 0.0;
  a.values[3] = 2.0 * end.s_dot / bounds.v_max - 1.0;
  return a;
}

}  // namespace raceduel
