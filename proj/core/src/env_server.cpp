#include "raceduel/env_server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "raceduel/dynamics.hpp"

namespace raceduel {

using nlohmann::json;

double reward(const Transition& tr, RewardState& state, const VehicleGeometry& geometry) {
  const double relative_speed = tr.sdot_o - tr.sdot_b;
  double r = 0.0;
  if (tr.status == EpisodeStatus::success) {
    r = 10.0;
  } else if (tr.status != EpisodeStatus::running) {
    r = -1.0;
  } else {
    const bool overlapping =
        tr.s_b - geometry.length <= tr.s_o && tr.s_o <= tr.s_b + geometry.length;
    if (state.lateral_term && overlapping) {
      r += 0.5 * (std::abs(tr.n_o - tr.n_b) - state.k_scl * geometry.width);
    }
    if (relative_speed > state.max_relative_speed) {
      r += relative_speed - state.max_relative_speed;
    }
  }
  if (relative_speed > state.max_relative_speed) state.max_relative_speed = relative_speed;
  return r;
}

CurriculumStage curriculum_stage(int stage) {
  if (stage < 1 || stage > 6) throw std::invalid_argument("curriculum stage must be in 1..6");
  if (stage == 1) return {1, 1.0, false};
  return {stage, 0.2 * (stage - 1), true};
}

EnvSession::EnvSession(EnvServerConfig config, int default_stage)
    : config_(std::move(config)), default_stage_(default_stage) {
  curriculum_stage(default_stage_);
  if (config_.lookaheads.empty()) throw std::invalid_argument("no lookahead values configured");
}

namespace {

json error_reply(const std::string& message) {
  return {{"v", kProtocolVersion}, {"error", message}};
}

json state_json(const MdpState& st) { return std::vector<double>(st.values.begin(), st.values.end()); }

}  // namespace

EnvSession::Reply EnvSession::handle(std::string_view line) {
  json request;
  try {
    request = json::parse(line);
  } catch (const json::exception& e) {
    return {error_reply(std::string("malformed message: ") + e.what()).dump(), false};
  }
  if (!request.is_object()) return {error_reply("message must be an object").dump(), false};
  if (!request.contains("v") || !request["v"].is_string() ||
      request["v"].get<std::string>() != kProtocolVersion) {
    return {error_reply("protocol version mismatch; expected v1").dump(), true};
  }

  try {
    const std::string cmd = request.at("cmd").get<std::string>();
    if (cmd == "close") {
      return {json{{"v", kProtocolVersion}, {"closed", true}}.dump(), true};
    }

    if (cmd == "reset") {
      const int stage = request.value("stage", default_stage_);
      const CurriculumStage cs = curriculum_stage(stage);
      const std::uint64_t seed = request.value("seed", std::uint64_t{0});
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> gap_dist(config_.gap_min, config_.gap_max);
      std::uniform_real_distribution<double> offset_dist(config_.offset_min, config_.offset_max);
      std::uniform_int_distribution<std::size_t> lookahead_dist(0, config_.lookaheads.size() - 1);

      ScenarioConfig sc = config_.base;
      sc.opponent_gap = gap_dist(rng);
      sc.opponent_offset = offset_dist(rng);
      sc.blocking.lookahead = config_.lookaheads[lookahead_dist(rng)];
      sc.noise.seed = rng();
      if (request.contains("scenario")) {
        const json& scen = request["scenario"];
        sc.opponent_gap = scen.value("s_b_init", sc.opponent_gap);
        sc.opponent_offset = scen.value("n_b_init", sc.opponent_offset);
        sc.blocking.lookahead = scen.value("s_d", sc.blocking.lookahead);
        sc.noise.stddev = scen.value("noise_sigma", sc.noise.stddev);
      }
      // Actions arrive over the wire; the scenario's own planner is never invoked.
      sc.planner = PlannerSpec::conventional("small-ch");
      sc.max_steps = config_.max_steps;
      sc.collisions = cs.opponent_active;
      sc.footprint_scale = cs.k_scl;
      episode_ = std::make_unique<Episode>(sc);
      reward_state_ = RewardState{0.0, cs.k_scl, stage, cs.opponent_active};

      json reply{{"v", kProtocolVersion},
                 {"state", state_json(episode_->observe())},
                 {"info",
                  {{"s_b_init", sc.opponent_gap},
                   {"n_b_init", sc.opponent_offset},
                   {"s_d", sc.blocking.lookahead},
                   {"stage", stage},
                   {"k_scl", cs.k_scl}}}};
      return {reply.dump(), false};
    }

    if (cmd == "step") {
      if (!episode_) return {error_reply("step before reset").dump(), false};
      if (episode_->done()) return {error_reply("episode finished; reset first").dump(), false};
      const auto raw = request.at("action").get<std::vector<double>>();
      if (raw.size() != kActionDim) return {error_reply("action must have 4 elements").dump(), false};
      MdpAction action;
      for (std::size_t i = 0; i < kActionDim; ++i) {
        if (!std::isfinite(raw[i])) return {error_reply("action must be finite").dump(), false};
        action.values[i] = raw[i];
      }
      const EndState end = denormalize_action(action, ActionBounds{});
      const StepReport rep = episode_->step_with_end_state(end, config_.safety_layer);

      const auto& ego = episode_->ego();
      const auto& opp = episode_->opponent();
      Transition tr;
      tr.status = rep.status;
      tr.s_o = ego.s;
      tr.s_b = opp.s;
      tr.n_o = ego.n;
      tr.n_b = opp.n;
      tr.sdot_o = ego.s_dot;
      tr.sdot_b = longitudinal_velocity(opp, episode_->config().track);
      const double r = reward(tr, reward_state_, episode_->config().geometry);

      json reply{{"v", kProtocolVersion},
                 {"state", state_json(episode_->observe())},
                 {"reward", r},
                 {"done", episode_->done()},
                 {"info",
                  {{"status", std::string(to_string(rep.status))},
                   {"steps", episode_->steps()},
                   {"feasible", rep.requested_verdict.feasible},
                   {"safety_engaged", rep.safety_engaged}}}};
      return {reply.dump(), false};
    }

    return {error_reply("unknown command '" + cmd + "'").dump(), false};
  } catch (const json::exception& e) {
    return {error_reply(std::string("malformed message: ") + e.what()).dump(), false};
  } catch (const std::invalid_argument& e) {
    return {error_reply(std::string("invalid request: ") + e.what()).dump(), false};
  }
}

void serve_stream(std::istream& in, std::ostream& out, EnvSession& session) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto reply = session.handle(line);
    out << reply.text << '\n' << std::flush;
    if (reply.close) break;
  }
}

namespace {

class SocketLineIo {
 public:
  explicit SocketLineIo(int fd) : fd_(fd) {}
  ~SocketLineIo() { ::close(fd_); }
  SocketLineIo(const SocketLineIo&) = delete;
  SocketLineIo& operator=(const SocketLineIo&) = delete;

  bool read_line(std::string& line) {
    for (;;) {
      const auto pos = buffer_.find('\n');
      if (pos != std::string::npos) {
        line = buffer_.substr(0, pos);
        buffer_.erase(0, pos + 1);
        return true;
      }
      char chunk[4096];
      const ssize_t got = ::recv(fd_, chunk, sizeof chunk, 0);
      if (got <= 0) return false;
      buffer_.append(chunk, static_cast<std::size_t>(got));
    }
  }

  void write_line(const std::string& line) {
    const std::string data = line + '\n';
    std::size_t sent = 0;
    while (sent < data.size()) {
      const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, 0);
      if (n <= 0) throw std::runtime_error("env socket write failed");
      sent += static_cast<std::size_t>(n);
    }
  }

 private:
  int fd_;
  std::string buffer_;
};

void serve_tcp(const std::string& host, const std::string& port, EnvSession& session) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0 || !res) {
    throw std::runtime_error("cannot resolve endpoint " + host + ":" + port);
  }
  const int listener = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  const int yes = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  if (listener < 0 || ::bind(listener, res->ai_addr, res->ai_addrlen) != 0 ||
      ::listen(listener, 1) != 0) {
    ::freeaddrinfo(res);
    if (listener >= 0) ::close(listener);
    throw std::runtime_error("cannot listen on " + host + ":" + port);
  }
  ::freeaddrinfo(res);
  std::cerr << "raceduel env listening on " << host << ":" << port << std::endl;
  const int conn = ::accept(listener, nullptr, nullptr);
  ::close(listener);
  if (conn < 0) throw std::runtime_error("accept failed");

  SocketLineIo io(conn);
  std::string line;
  while (io.read_line(line)) {
    if (line.empty()) continue;
    const auto reply = session.handle(line);
    io.write_line(reply.text);
    if (reply.close) break;
  }
}

}  // namespace

void serve(const std::string& endpoint, const EnvServerConfig& config, int stage) {
  EnvSession session(config, stage);
  if (endpoint == "stdio" || endpoint == "-") {
    serve_stream(std::cin, std::cout, session);
    return;
  }
  constexpr std::string_view tcp_prefix = "tcp://";
  if (endpoint.rfind(tcp_prefix, 0) == 0) {
    const std::string rest = endpoint.substr(tcp_prefix.size());
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw std::invalid_argument("tcp endpoint needs HOST:PORT");
    serve_tcp(rest.substr(0, colon), rest.substr(colon + 1), session);
    return;
  }
  throw std::invalid_argument("unsupported endpoint '" + endpoint + "' (use stdio or tcp://HOST:PORT)");
}

}  // namespace raceduel
