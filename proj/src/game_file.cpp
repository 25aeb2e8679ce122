#include "shg/game_file.hpp"

#include "shg/games.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace shg {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

GameTree tree_from(const json& j) {
  if (!j.contains("levels")) throw ConfigError("game definition needs 'levels'");
  auto levels = j.at("levels").get<std::vector<int>>();
  int n = 0;
  for (int s : levels) n += s;

  std::map<PlayerId, PlayerId> parents;
  if (j.contains("parents")) {
    const json& p = j.at("parents");
    if (!p.is_array() || static_cast<int>(p.size()) != n)
      throw ConfigError("'parents' must list one entry per player (null for the root)");
    for (int i = 0; i < n; ++i)
      if (!p[i].is_null()) parents[i] = p[i].get<int>();
  } else {
    GameTree balanced = build_balanced_tree(levels);
    for (PlayerId i = 1; i < n; ++i) parents[i] = *balanced.parent_of(i);
  }

  std::map<PlayerId, int> dims;
  if (j.contains("action_dims")) {
    const json& d = j.at("action_dims");
    if (d.is_number_integer()) {
      for (int i = 0; i < n; ++i) dims[i] = d.get<int>();
    } else {
      if (static_cast<int>(d.size()) != n) throw ConfigError("'action_dims' must be an integer or one per player");
      for (int i = 0; i < n; ++i) dims[i] = d[i].get<int>();
    }
  }

  std::map<PlayerId, Bounds> bounds;
  if (j.contains("bounds") && !j.at("bounds").is_null()) {
    const json& b = j.at("bounds");
    auto one = [](const json& e) {
      if (!e.is_array() || e.size() != 2) throw ConfigError("a bound is a [lo, hi] pair");
      return Interval{e[0].get<double>(), e[1].get<double>()};
    };
    for (int i = 0; i < n; ++i) {
      const json& e = (b.is_array() && b.size() == 2 && b[0].is_number()) ? b : b.at(i);
      if (e.is_null()) continue;
      int d = dims.count(i) ? dims[i] : 1;
      bounds[i] = Bounds(d, one(e));
    }
  }
  return build_tree(levels, parents, dims, bounds);
}

Game polynomial_from(const json& j) {
  GameTree tree = tree_from(j);
  const json& us = j.at("utilities");
  if (!us.is_array() || static_cast<int>(us.size()) != tree.num_players())
    throw ConfigError("'utilities' needs one term list per player");
  std::vector<Polynomial> polys;
  for (const json& terms : us) {
    Polynomial p;
    for (const json& t : terms) {
      std::vector<std::pair<int, int>> powers;
      for (const json& f : t.value("x", json::array())) {
        if (!f.is_array() || f.size() != 3) throw ConfigError("a factor is [player, component, power]");
        int player = f[0].get<int>(), comp = f[1].get<int>(), pow = f[2].get<int>();
        tree.check_player(player);
        if (comp < 0 || comp >= tree.action_dim(player)) throw ConfigError("factor component out of range");
        if (pow < 1) throw ConfigError("factor power must be positive");
        powers.emplace_back(tree.offset(player) + comp, pow);
      }
      p.add_term(t.at("c").get<double>(), powers);
    }
    polys.push_back(std::move(p));
  }
  return make_polynomial(j.value("name", "polynomial"), std::move(tree), std::move(polys));
}

Game epidemic_from(const json& j, std::uint64_t seed) {
  EpidemicParams p;
  p.shape = j.at("levels").get<std::vector<int>>();
  p.seed = get_or<std::uint64_t>(j, "seed", seed);
  p.contacts = get_or(j, "contacts", p.contacts);
  p.infection_prob = get_or(j, "infection_prob", p.infection_prob);
  p.population = get_or(j, "population", p.population);
  p.initial_infected = get_or(j, "initial_infected", p.initial_infected);
  p.kappa = get_or(j, "kappa", p.kappa);
  p.eta = get_or(j, "eta", p.eta);
  if (j.contains("transport")) {
    auto rows = j.at("transport").get<std::vector<std::vector<double>>>();
    Matrix r(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
      if (rows[a].size() != static_cast<std::size_t>(r.cols())) throw ConfigError("ragged transport matrix");
      for (std::size_t b = 0; b < rows[a].size(); ++b) r(a, b) = rows[a][b];
    }
    p.transport = r;
  }
  Game g = make_epidemic(p);
  if (j.contains("name")) g.name = j.at("name").get<std::string>();
  return g;
}

Game public_goods_from(const json& j, const std::filesystem::path& base) {
  auto resolve = [&base](const std::string& s) {
    std::filesystem::path p(s);
    return p.is_absolute() ? p : base / p;
  };
  PublicGoodsParams p;
  std::filesystem::path data = default_data_dir();
  p.network = load_edge_list(j.contains("network") ? resolve(j.at("network").get<std::string>())
                                                   : data / "karate.edgelist");
  p.partition = load_partition(j.contains("partition") ? resolve(j.at("partition").get<std::string>())
                                                       : data / "karate_factions.txt",
                               static_cast<int>(p.network.rows()));
  p.a = get_or(j, "a", p.a);
  p.b = get_or(j, "b", p.b);
  p.c = get_or(j, "c", p.c);
  p.kappa_mid = get_or(j, "kappa_mid", p.kappa_mid);
  p.kappa_leaf = get_or(j, "kappa_leaf", p.kappa_leaf);
  std::string cost = get_or<std::string>(j, "cost", "quadratic");
  if (cost == "quadratic")
    p.cost = CostForm::Quadratic;
  else if (cost == "linear")
    p.cost = CostForm::Linear;
  else
    throw ConfigError("public_goods cost must be 'quadratic' or 'linear'");
  Game g = make_public_goods(p);
  if (j.contains("name")) g.name = j.at("name").get<std::string>();
  return g;
}

Game security_from(const json& j) {
  SecurityParams p;
  p.shape = get_or(j, "levels", p.shape);
  p.q = get_or(j, "q", p.q);
  p.cost = get_or(j, "cost", p.cost);
  p.sharpness = get_or(j, "sharpness", p.sharpness);
  p.kappa = get_or(j, "kappa", p.kappa);
  Game g = make_security(p);
  if (j.contains("name")) g.name = j.at("name").get<std::string>();
  return g;
}

}  // namespace

Game parse_game_definition(const std::string& text, const std::filesystem::path& base_dir, std::uint64_t seed) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("game definition is not valid JSON: ") + e.what());
  }
  try {
    std::string kind = j.at("game_kind").get<std::string>();
    if (kind == "polynomial") return polynomial_from(j);
    if (kind == "epidemic") return epidemic_from(j, seed);
    if (kind == "public_goods") return public_goods_from(j, base_dir);
    if (kind == "security") return security_from(j);
    if (kind == "builtin") return make_builtin(j.at("name").get<std::string>(), get_or<std::uint64_t>(j, "seed", seed));
    throw ConfigError("unknown game_kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad game definition: ") + e.what());
  }
}

Game load_game_file(const std::filesystem::path& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open game file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_game_definition(ss.str(), path.parent_path(), seed);
}

}  // namespace shg
