#include "shg/games.hpp"

namespace shg {

std::vector<std::string> builtin_names() {
  return {"p111",           "p112",         "p111_3d",      "epidemic_1_20", "epidemic_1_50",
          "epidemic_1_2_4", "epidemic_1_2_10", "public_goods", "security_k01",  "security_k05"};
}

Game make_builtin(const std::string& name, std::uint64_t seed) {
  if (name == "p111") return make_polynomial(PolynomialInstance::P111);
  if (name == "p112") return make_polynomial(PolynomialInstance::P112);
  if (name == "p111_3d") return make_polynomial(PolynomialInstance::P111_3D);
  if (name == "epidemic_1_20") return make_epidemic(epidemic_defaults({1, 20}, seed));
  if (name == "epidemic_1_50") return make_epidemic(epidemic_defaults({1, 50}, seed));
  if (name == "epidemic_1_2_4") return make_epidemic(epidemic_defaults({1, 2, 4}, seed));
  if (name == "epidemic_1_2_10") return make_epidemic(epidemic_defaults({1, 2, 10}, seed));
  if (name == "public_goods") return make_public_goods(karate_public_goods(default_data_dir()));
  if (name == "security_k01" || name == "security_k05") {
    SecurityParams p;
    p.kappa = name == "security_k01" ? 0.1 : 0.5;
    Game g = make_security(p);
    g.name = name;
    return g;
  }
  throw ConfigError("unknown game '" + name + "'");
}

}  // namespace shg
