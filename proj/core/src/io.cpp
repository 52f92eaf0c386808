#include "robust_trade/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "robust_trade/errors.hpp"

namespace robust_trade {
namespace {

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse " + what + " '" + s + "'");
  }
  if (used != s.size()) throw ValidationError("cannot parse " + what + " '" + s + "'");
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

json table_rows(const BlockTable& t) {
  json rows = json::array();
  for (int k = 1; k <= t.n(); ++k) {
    json row = json::array();
    for (int l = 1; l <= t.n(); ++l) row.push_back(t(k, l));
    rows.push_back(std::move(row));
  }
  return rows;
}

BlockTable table_from_rows(const json& j, int n, const char* name) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ValidationError(std::string(name) + " must be an array of " + std::to_string(n) + " rows");
  }
  BlockTable t(n);
  for (int k = 1; k <= n; ++k) {
    const json& row = j[static_cast<std::size_t>(k - 1)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ValidationError(std::string(name) + " row " + std::to_string(k) + " must have " + std::to_string(n) +
                            " entries");
    }
    for (int l = 1; l <= n; ++l) t(k, l) = row[static_cast<std::size_t>(l - 1)].get<double>();
  }
  return t;
}

}  // namespace

MarginalDistribution marginal_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ValidationError("marginal must be a JSON object");
    if (j.contains("knots")) {
      std::vector<Knot> knots;
      std::size_t i = 0;
      for (const auto& k : j.at("knots")) {
        if (!k.is_array() || k.size() != 2) throw ValidationError("knot " + std::to_string(i) + ": expected [x, F]");
        knots.push_back({k[0].get<double>(), k[1].get<double>()});
        ++i;
      }
      return MarginalDistribution::from_knots(std::move(knots));
    }
    const std::string family = j.value("family", "");
    if (family == "uniform") return MarginalDistribution::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
    throw ValidationError("marginal needs \"knots\" or \"family\": \"uniform\"");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed marginal: ") + e.what());
  }
}

json marginal_to_json(const MarginalDistribution& m) {
  json knots = json::array();
  for (const auto& k : m.knots()) knots.push_back({k.point, k.cumulative});
  return {{"knots", knots}};
}

MarginalDistribution parse_marginal_spec(const std::string& spec) {
  if (spec.empty()) throw ValidationError("empty marginal spec");
  if (spec.front() == '{') {
    try {
      return marginal_from_json(json::parse(spec));
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("malformed marginal JSON: ") + e.what());
    }
  }
  if (spec.rfind("uniform:", 0) == 0) {
    const auto parts = split(spec.substr(8), ',');
    if (parts.size() != 2) throw ValidationError("uniform spec is uniform:lo,hi");
    return MarginalDistribution::uniform(parse_number(parts[0], "lo"), parse_number(parts[1], "hi"));
  }
  if (spec.rfind("knots:", 0) == 0) {
    std::vector<Knot> knots;
    const auto items = split(spec.substr(6), ',');
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto xy = split(items[i], ':');
      if (xy.size() != 2) throw ValidationError("knot " + std::to_string(i) + ": expected x:F");
      knots.push_back({parse_number(xy[0], "knot " + std::to_string(i) + " point"),
                       parse_number(xy[1], "knot " + std::to_string(i) + " cumulative")});
    }
    return MarginalDistribution::from_knots(std::move(knots));
  }
  std::ifstream in(spec);
  if (!in) throw ValidationError("marginal spec '" + spec + "' is neither a known form nor a readable file");
  try {
    return marginal_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed marginal file " + spec + ": " + e.what());
  }
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_coupling_csv(std::ostream& os, const GridCoupling& h) {
  os << "row,col,v,c,mass\n";
  for (std::size_t i = 0; i < h.mass.rows(); ++i) {
    for (std::size_t j = 0; j < h.mass.cols(); ++j) {
      if (h.mass(i, j) == 0.0) continue;
      os << i << ',' << j << ',' << format_double(h.row_points[i]) << ',' << format_double(h.col_points[j]) << ','
         << format_double(h.mass(i, j)) << '\n';
    }
  }
}

GridCoupling read_coupling_csv(std::istream& is) {
  struct Cell {
    std::size_t i, j;
    double v, c, m;
  };
  std::vector<Cell> cells;
  std::string line;
  std::getline(is, line);
  if (line.rfind("row,col,v,c,mass", 0) != 0) throw ValidationError("coupling CSV header must be row,col,v,c,mass");
  std::size_t rows = 0;
  std::size_t cols = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) throw ValidationError("coupling CSV line '" + line + "' needs 5 fields");
    Cell c{static_cast<std::size_t>(parse_number(f[0], "row")), static_cast<std::size_t>(parse_number(f[1], "col")),
           parse_number(f[2], "v"), parse_number(f[3], "c"), parse_number(f[4], "mass")};
    rows = std::max(rows, c.i + 1);
    cols = std::max(cols, c.j + 1);
    cells.push_back(c);
  }
  GridCoupling h{Matrix(rows, cols), std::vector<double>(rows), std::vector<double>(cols)};
  for (const auto& c : cells) {
    h.mass(c.i, c.j) = c.m;
    h.row_points[c.i] = c.v;
    h.col_points[c.j] = c.c;
  }
  return h;
}

json coupling_to_json(const GridCoupling& h) {
  json mass = json::array();
  for (std::size_t i = 0; i < h.mass.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < h.mass.cols(); ++j) row.push_back(h.mass(i, j));
    mass.push_back(std::move(row));
  }
  return {{"rows", h.mass.rows()},
          {"cols", h.mass.cols()},
          {"row_points", h.row_points},
          {"col_points", h.col_points},
          {"mass", mass}};
}

GridCoupling coupling_from_json(const json& j) {
  try {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    GridCoupling h{Matrix(rows, cols), j.at("row_points").get<std::vector<double>>(),
                   j.at("col_points").get<std::vector<double>>()};
    if (h.row_points.size() != rows || h.col_points.size() != cols) {
      throw ValidationError("coupling points do not match its dimensions");
    }
    const json& mass = j.at("mass");
    if (mass.size() != rows) throw ValidationError("coupling mass has the wrong number of rows");
    for (std::size_t i = 0; i < rows; ++i) {
      if (mass[i].size() != cols) throw ValidationError("coupling mass row " + std::to_string(i) + " has wrong length");
      for (std::size_t c = 0; c < cols; ++c) h.mass(i, c) = mass[i][c].get<double>();
    }
    return h;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed coupling: ") + e.what());
  }
}

json to_json(const RobustAnalysis& a) {
  return {{"price", a.price}, {"trade_floor", a.trade_floor}, {"x", a.x}, {"y", a.y}, {"a", a.a},
          {"b", a.b},         {"d", a.d},                     {"z", a.z}, {"efficiency", a.efficiency}};
}

json to_json(const OptimizeResult& r) {
  return {{"price", r.price}, {"value", r.value}, {"analysis", to_json(r.analysis)}};
}

json to_json(const BlockTable& t) { return table_rows(t); }

json to_json(const BlockMechanism& m) {
  return {{"n", m.n()}, {"q", table_rows(m.q)}, {"t_b", table_rows(m.t_b)}, {"t_s", table_rows(m.t_s)}};
}

BlockMechanism block_mechanism_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    return {table_from_rows(j.at("q"), n, "q"), table_from_rows(j.at("t_b"), n, "t_b"),
            table_from_rows(j.at("t_s"), n, "t_s")};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed block mechanism: ") + e.what());
  }
}

json to_json(const PostedPriceVector& u) { return u.u; }

PostedPriceVector posted_price_vector_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("posted price vector must be a JSON array");
  try {
    PostedPriceVector u{j.get<std::vector<double>>()};
    validate_posted_price_vector(u);
    return u;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed posted price vector: ") + e.what());
  }
}

json to_json(const MinimaxReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels) {
    levels.push_back(
        {{"n", l.n}, {"value", l.value}, {"best_price", l.best_price}, {"value_at_p_star", l.value_at_p_star}});
  }
  json cells = json::array();
  for (const auto& c : r.witness.cells) {
    cells.push_back({{"v_lo", c.v_lo}, {"v_hi", c.v_hi}, {"c_lo", c.c_lo}, {"c_hi", c.c_hi}, {"mass", c.mass}});
  }
  const json witness = {{"level", r.witness.level}, {"cells", cells}, {"coupling", coupling_to_json(r.witness.coupling)}};
  return {{"maxmin_value", r.maxmin_value},
          {"minmax_value", r.minmax_value},
          {"gap", r.gap},
          {"price", r.price},
          {"oracle_value", r.oracle_value},
          {"grid", r.grid},
          {"witness_level", r.witness_level},
          {"witness", witness},
          {"levels", levels},
          {"tolerances", {{"cross_check", r.tolerance}}}};
}

void write_sweep_csv(std::ostream& os, const std::vector<RobustAnalysis>& rows) {
  os << "p,ell_p,x_p,y_p,eff\n";
  for (const auto& r : rows) {
    os << format_double(r.price) << ',' << format_double(r.trade_floor) << ',' << format_double(r.x) << ','
       << format_double(r.y) << ',' << format_double(r.efficiency) << '\n';
  }
}

void write_convergence_csv(std::ostream& os, const std::vector<MinimaxLevel>& levels) {
  os << "n,minmax_n\n";
  for (const auto& l : levels) os << l.n << ',' << format_double(l.value) << '\n';
}

}  // namespace robust_trade
