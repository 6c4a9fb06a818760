#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "raceduel/rl_policy.hpp"

using namespace raceduel;
using doctest::Approx;

namespace {

const std::array<std::size_t, 4> kArch{12, 256, 256, 4};

PolicyWeights random_policy(unsigned seed) {
  auto w = PolicyWeights::zeros(kArch);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.1);
  for (auto& l : w.layers) {
    for (double& x : l.weights) x = g(rng);
    for (double& x : l.bias) x = g(rng);
  }
  return w;
}

MdpState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MdpState s;
  for (double& x : s.values) x = u(rng);
  return s;
}

}  // namespace

TEST_SUITE("rl_policy") {

TEST_CASE("state construction") {
  const TrackModel track;
  const NormalizationConstants norms;
  auto st = build_state({}, {}, track, norms);
  for (double x : st.values) CHECK(x == 0.0);

  const FrenetState ego{150.0, 50.0, 5.0, 1.5, 8.5, -2.5};
  const CurvilinearState opp{200.0, -1.5, 0.05, 50.0, 0.0};
  st = build_state(ego, opp, track, norms);
  CHECK(st.values[0] == Approx(0.1));
  CHECK(st.values[1] == Approx(0.588235).epsilon(1e-6));
  CHECK(st.values[2] == Approx(0.2));
  CHECK(st.values[3] == Approx(0.2));
  CHECK(st.values[4] == Approx(0.1));
  CHECK(st.values[5] == Approx(-0.1));
  CHECK(st.values[6] == Approx(std::atan2(8.5, 50.0) / (M_PI / 2)));
  CHECK(st.values[7] == Approx(-0.5));
  CHECK(st.values[8] == Approx((50.0 - 50.0 * std::cos(0.05)) / 35.0));
  CHECK(st.values[9] == Approx(3.0 / 15.0));
  CHECK(st.values[10] == Approx((8.5 - 50.0 * std::sin(0.05)) / 35.0));
  CHECK(st.values[11] == Approx((std::atan2(8.5, 50.0) - 0.05) / (M_PI / 2)));
}

TEST_CASE("state components are clamped and noise only moves the relative speed") {
  const TrackModel track;
  const NormalizationConstants norms;
  const FrenetState ego{3000.0, 200.0, 90.0, 9.0, -100.0, 0.0};
  const CurvilinearState opp{0.0, 0.0, 0.0, 50.0, 0.0};
  const auto st = build_state(ego, opp, track, norms);
  for (double x : st.values) {
    CHECK(x <= 1.0);
    CHECK(x >= -1.0);
  }
  const FrenetState calm{10.0, 50.0, 0.0, 0.0, 0.0, 0.0};
  const auto a = build_state(calm, {30.0, 0.0, 0.0, 50.0, 0.0}, track, norms, 0.0);
  const auto b = build_state(calm, {30.0, 0.0, 0.0, 50.0, 0.0}, track, norms, 0.7);
  for (std::size_t i = 0; i < kStateDim; ++i) {
    if (i == 8) {
      CHECK(b.values[i] == Approx(a.values[i] - 0.7 / 35.0));
    } else {
      CHECK(a.values[i] == b.values[i]);
    }
  }
}

TEST_CASE("zero network gives the zero action") {
  const auto w = PolicyWeights::zeros(kArch);
  CHECK(w.architecture() == std::vector<std::size_t>{12, 256, 256, 4});
  std::mt19937_64 rng(1);
  const auto a = forward(random_state(rng), w);
  for (double x : a.values) CHECK(x == 0.0);
}

TEST_CASE("single-path network matches the scalar tanh chain") {
  auto w = PolicyWeights::zeros(kArch);
  const double a = 0.9, b = -1.3, c = 2.1, b1 = 0.2, b2 = -0.1, b3 = 0.05;
  w.layers[0].weights[0 * 12 + 3] = a;
  w.layers[0].bias[0] = b1;
  w.layers[1].weights[0 * 256 + 0] = b;
  w.layers[1].bias[0] = b2;
  w.layers[2].weights[2 * 256 + 0] = c;
  w.layers[2].bias[2] = b3;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto s = random_state(rng);
    const auto out = forward(s, w);
    const long double x = s.values[3];
    const long double expect =
        std::tanh(c * std::tanh(b * std::tanh(a * x + b1) + b2 + 0.0L) + b3 + 0.0L);
    CHECK(out.values[2] == Approx(static_cast<double>(expect)).epsilon(1e-14));
    // Other outputs see tanh(c_j * tanh(b2_j ...)) with zero weights: zero.
    CHECK(out.values[0] == 0.0);
  }
}

TEST_CASE("forward is deterministic") {
  const auto w = random_policy(5);
  std::mt19937_64 rng(9);
  const auto s = random_state(rng);
  const auto a = forward(s, w), b = forward(s, w);
  CHECK(a.values == b.values);
}

TEST_CASE("action mapping") {
  const ActionBounds bounds;
  auto e = denormalize_action({{0, 0, 0, 0}}, bounds);
  CHECK(e.n == 0.0);
  CHECK(e.n_dot == 0.0);
  CHECK(e.n_ddot == 0.0);
  CHECK(e.s_dot == 42.5);
  e = denormalize_action({{1, 0.3, 0.3, 1}}, bounds);
  CHECK(e.n == 6.535);
  CHECK(e.s_dot == 85.0);
  e = denormalize_action({{-1, 0.3, 0.3, -1}}, bounds);
  CHECK(e.n == -6.535);
  CHECK(e.s_dot == 0.0);
  e = denormalize_action({{-3, 5, -5, 2}}, bounds);
  CHECK(e.n == -6.535);
  CHECK(e.n_dot == 15.0);
  CHECK(e.n_ddot == -25.0);
  CHECK(e.s_dot == 85.0);
}

TEST_CASE("normalize then denormalize is the identity in bounds") {
  const ActionBounds bounds;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> n(-6.535, 6.535), nd(-15, 15), ndd(-25, 25), v(0, 85);
  for (int i = 0; i < 1000; ++i) {
    const EndState e{n(rng), nd(rng), ndd(rng), v(rng)};
    const auto back = denormalize_action(normalize_action(e, bounds), bounds);
    REQUIRE(std::abs(back.n - e.n) <= 1e-12);
    REQUIRE(std::abs(back.n_dot - e.n_dot) <= 1e-12);
    REQUIRE(std::abs(back.n_ddot - e.n_ddot) <= 1e-12);
    REQUIRE(std::abs(back.s_dot - e.s_dot) <= 1e-12);
  }
}

TEST_CASE("weights file round trip") {
  auto w = random_policy(31);
  w.norms.gap = 120.0;
  w.bounds.lateral_velocity = 10.0;
  w.metadata_json = R"({"seed":3})";
  const auto text = w.to_json_text();
  const auto doc = nlohmann::json::parse(text);
  CHECK(doc.at("architecture") == nlohmann::json({12, 256, 256, 4}));
  CHECK(doc.at("activation") == "tanh");
  CHECK(doc.at("layers").size() == 3);
  CHECK(doc.at("layers")[0].at("w").size() == 256);
  CHECK(doc.at("layers")[0].at("w")[0].size() == 12);
  CHECK(doc.contains("norms"));
  CHECK(doc.contains("action_bounds"));

  const auto back = PolicyWeights::parse(text);
  CHECK(back.norms.gap == 120.0);
  CHECK(back.bounds.lateral_velocity == 10.0);
  CHECK(nlohmann::json::parse(back.metadata_json).at("seed") == 3);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_state(rng);
    REQUIRE(forward(s, back).values == forward(s, w).values);
  }

  const auto path = std::filesystem::temp_directory_path() / "raceduel_policy_roundtrip.json";
  w.save(path.string());
  CHECK(PolicyWeights::load(path.string()).architecture() == w.architecture());
  std::filesystem::remove(path);
}

TEST_CASE("malformed weights files are rejected") {
  CHECK_THROWS_AS(PolicyWeights::parse("{not json"), std::runtime_error);
  CHECK_THROWS_AS(PolicyWeights::parse("{}"), std::runtime_error);
  auto doc = nlohmann::json::parse(random_policy(1).to_json_text());

  auto bad = doc;
  bad["architecture"] = {12, 256, 4};
  CHECK_THROWS_AS(PolicyWeights::parse(bad.dump()), std::runtime_error);
  bad = doc;
  bad["layers"][1]["w"][0].erase(0);
  CHECK_THROWS_AS(PolicyWeights::parse(bad.dump()), std::runtime_error);
  bad = doc;
  bad["layers"][2]["b"].erase(0);
  CHECK_THROWS_AS(PolicyWeights::parse(bad.dump()), std::runtime_error);
  bad = doc;
  bad["activation"] = "relu";
  CHECK_THROWS_AS(PolicyWeights::parse(bad.dump()), std::runtime_error);
  bad = doc;
  bad["architecture"] = {10, 256, 256, 4};
  CHECK_THROWS_AS(PolicyWeights::parse(bad.dump()), std::runtime_error);
  bad = doc;
  bad["layers"][0]["b"][0] = "x";
  CHECK_THROWS_AS(PolicyWeights::parse(bad.dump()), std::runtime_error);
  CHECK_THROWS_AS(PolicyWeights::load("/nonexistent/policy.json"), std::runtime_error);
}

TEST_CASE("validation catches non-finite values and broken chains") {
  auto w = random_policy(2);
  w.layers[1].weights[5] = std::nan("");
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  w = random_policy(2);
  w.layers[1].inputs = 128;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  CHECK_THROWS_AS(PolicyWeights{}.validate(), std::invalid_argument);
}

TEST_CASE("checked-in reference policy loads") {
  if (!std::filesystem::exists(RACEDUEL_REFERENCE_POLICY)) {
    MESSAGE("no reference policy at " RACEDUEL_REFERENCE_POLICY);
    return;
  }
  const auto w = PolicyWeights::load(RACEDUEL_REFERENCE_POLICY);
  CHECK(w.architecture() == std::vector<std::size_t>{12, 256, 256, 4});
  CHECK_NOTHROW(w.validate());
}

}
