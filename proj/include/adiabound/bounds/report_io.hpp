#pragma once

#include <cmath>
#include <string>

#include "json.hpp"

#include "adiabound/bounds/bounds.hpp"
#include "adiabound/bounds/gap.hpp"

namespace adiabound::bounds {

inline nlohmann::json to_json(const Margin& m) {
  return {{"beta", m.beta},         {"lhs", m.lhs},
          {"rhs", m.rhs},           {"slack", m.slack},
          {"distance", m.distance}, {"shifted_norm", m.shifted_norm},
          {"applicable", m.applicable}, {"holds", m.holds}};
}

inline nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json margins = nlohmann::json::array();
  for (const auto& m : r.margins) margins.push_back(to_json(m));
  return {{"delta_ie", r.delta_ie},   {"integral_g", r.integral_g}, {"t_min", r.t_min},
          {"beta_star", r.beta_star}, {"margins", margins},         {"theta_note", r.theta_note}};
}

inline nlohmann::json to_json(const GapReport& r) {
  return {{"grid", r.grid},   {"E0", r.E0},       {"E1", r.E1},
          {"g_min", r.g_min}, {"g_min_location", r.g_min_location},
          {"norm_dH", r.norm_dH}, {"t_adb", std::isfinite(r.t_adb) ? nlohmann::json(r.t_adb) : nlohmann::json()},
          {"level_crossing", r.level_crossing}};
}

inline std::string margins_csv(const BoundReport& r) {
  std::string out = "beta,lhs,rhs,slack,distance,shifted_norm,applicable\n";
  auto num = [](double v) { return nlohmann::json(v).dump(); };
  for (const auto& m : r.margins) {
    out += num(m.beta) + "," + num(m.lhs) + "," + num(m.rhs) + "," + num(m.slack) + "," + num(m.distance) + "," +
           num(m.shifted_norm) + "," + (m.applicable ? "1" : "0") + "\n";
  }
  return out;
}

inline std::string gap_csv(const GapReport& r) {
  std::string out = "s,E0,E1,gap\n";
  auto num = [](double v) { return nlohmann::json(v).dump(); };
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    out += num(r.grid[i]) + "," + num(r.E0[i]) + "," + num(r.E1[i]) + "," + num(r.E1[i] - r.E0[i]) + "\n";
  }
  return out;
}

}  // namespace adiabound::bounds
