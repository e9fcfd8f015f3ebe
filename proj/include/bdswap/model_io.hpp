#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "models.hpp"

namespace bdswap {

using AnyModel = std::variant<StraussModel, PiecewisePairwiseModel, SmoothPairwiseModel>;

// Accepted forms:
//   {"type":"strauss","beta1":b1,"beta2":b2,"R":r}
//   {"type":"pairwise","beta1":b1,"phi":"piecewise","steps":[[r1,phi1],[r2,phi2],...]}
//   {"type":"pairwise","beta1":b1,"phi":"smooth","gamma":g,"R":r}
inline AnyModel model_from_json(const nlohmann::json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    const double beta1 = j.at("beta1").get<double>();
    if (type == "strauss") {
      return StraussModel(beta1, j.at("beta2").get<double>(), j.at("R").get<double>());
    }
    if (type == "pairwise") {
      const std::string phi = j.at("phi").get<std::string>();
      if (phi == "piecewise") {
        std::vector<PiecewisePairwiseModel::Step> steps;
        for (const auto& s : j.at("steps")) {
          if (!s.is_array() || s.size() != 2) throw std::invalid_argument("each step must be [radius, phi]");
          steps.push_back({s[0].get<double>(), s[1].get<double>()});
        }
        return PiecewisePairwiseModel(beta1, std::move(steps));
      }
      if (phi == "smooth") {
        return SmoothPairwiseModel(beta1, j.at("gamma").get<double>(), j.at("R").get<double>());
      }
      throw std::invalid_argument("unknown phi kind '" + phi + "'");
    }
    throw std::invalid_argument("unknown model type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed model JSON: ") + e.what());
  }
}

inline nlohmann::json model_to_json(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> nlohmann::json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, StraussModel>) {
          return {{"type", "strauss"}, {"beta1", m.activity()}, {"beta2", m.beta2()}, {"R", m.range()}};
        } else if constexpr (std::is_same_v<M, PiecewisePairwiseModel>) {
          nlohmann::json steps = nlohmann::json::array();
          for (const auto& s : m.steps()) steps.push_back({s.radius, s.phi});
          return {{"type", "pairwise"}, {"beta1", m.activity()}, {"phi", "piecewise"}, {"steps", steps}};
        } else {
          return {{"type", "pairwise"}, {"beta1", m.activity()}, {"phi", "smooth"}, {"gamma", m.gamma()},
                  {"R", m.range()}};
        }
      },
      model);
}

inline nlohmann::json configuration_to_json(const Configuration& config, const Window& window) {
  nlohmann::json points = nlohmann::json::array();
  for (PointId id : config.ids()) {
    const Point& p = *config.find(id);
    nlohmann::json coords = nlohmann::json::array();
    for (std::size_t k = 0; k < window.dim(); ++k) coords.push_back(p.coords[k]);
    points.push_back({{"id", p.id}, {"coords", coords}});
  }
  return points;
}

}  // namespace bdswap
