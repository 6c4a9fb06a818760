#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "raceduel/dynamics.hpp"
#include "raceduel/frenet.hpp"
#include "raceduel/track.hpp"

namespace raceduel {

inline constexpr std::size_t kStateDim = 12;
inline constexpr std::size_t kActionDim = 4;

/// Divisors that map raw observations into [-1, 1]. Stored in the weights
/// file so training and inference agree.
struct NormalizationConstants {
  double track_length = 1500.0;        // s_o
  double lateral = 7.5;                // n_o
  double velocity = 85.0;              // sdot_o, ndot_o
  double acceleration = 25.0;          // sddot_o, nddot_o
  double heading = 1.5707963267948966; // chi_o, chi_o - chi_b
  double gap = 100.0;                  // s_o - s_b
  double relative_velocity = 35.0;     // sdot_o - sdot_b, ndot_o - ndot_b
  double relative_lateral = 15.0;      // n_o - n_b
};

/// Symmetric end-state ranges of the action space; the end speed spans
/// [0, v_max].
struct ActionBounds {
  double lateral = 6.535;
  double lateral_velocity = 15.0;
  double lateral_acceleration = 25.0;
  double v_max = 85.0;
};

/// [s_o, sdot_o, sddot_o, n_o, ndot_o, nddot_o, chi_o,
///  s_o - s_b, sdot_o - sdot_b, n_o - n_b, ndot_o - ndot_b, chi_o - chi_b]
struct MdpState {
  std::array<double, kStateDim> values{};
};

/// Normalized [n_e, ndot_e, nddot_e, sdot_e].
struct MdpAction {
  std::array<double, kActionDim> values{};
};

/// Dense layer y = W x + b with W stored row-major as [outputs x inputs].
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;
};

/// Actor network and the normalization it was trained with.
struct PolicyWeights {
  std::vector<DenseLayer> layers;
  NormalizationConstants norms;
  ActionBounds bounds;
  std::string metadata_json = "{}";

  /// Checks layer chaining, 12-in/4-out shape and finiteness.
  void validate() const;
  std::vector<std::size_t> architecture() const;

  static PolicyWeights parse(const std::string& text);
  static PolicyWeights load(const std::string& path);
  std::string to_json_text() const;
  void save(const std::string& path) const;

  /// Zero-initialised 12-256-256-4 network.
  static PolicyWeights zeros(std::span<const std::size_t> architecture);
};

/// Ego-relative observation. `opponent_sdot_noise` is added to the
/// opponent's longitudinal velocity before it enters the state.
MdpState build_state(const FrenetState& ego, const CurvilinearState& opponent,
                     const TrackModel& track, const NormalizationConstants& norms,
                     double opponent_sdot_noise = 0.0);

/// Deterministic actor mean: tanh hidden layers and a tanh output.
MdpAction forward(const MdpState& state, const PolicyWeights& weights);

EndState denormalize_action(const MdpAction& action, const ActionBounds& bounds);
MdpAction normalize_action(const EndState& end, const ActionBounds& bounds);

}  // namespace raceduel
