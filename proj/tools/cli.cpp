#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "robust_trade/block_mechanism.hpp"
#include "robust_trade/errors.hpp"
#include "robust_trade/io.hpp"
#include "robust_trade/minimax.hpp"
#include "robust_trade/posted_price.hpp"

namespace robust_trade::cli {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string buyer;
  std::string seller;
  std::optional<std::size_t> grid;
  std::vector<std::size_t> refine{1, 2, 4, 8, 16};
  std::optional<double> price;
  std::string out;
  std::optional<double> tol;
  CellLift lift = CellLift::kComonotone;
};

struct Marginals {
  MarginalDistribution buyer;
  MarginalDistribution seller;
};

Marginals load_marginals(const RunConfig& cfg) {
  if (cfg.buyer.empty()) throw ValidationError("missing --buyer");
  if (cfg.seller.empty()) throw ValidationError("missing --seller");
  MarginalDistribution b = [&] {
    try {
      return parse_marginal_spec(cfg.buyer);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("buyer: ") + e.what());
    }
  }();
  MarginalDistribution s = [&] {
    try {
      return parse_marginal_spec(cfg.seller);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("seller: ") + e.what());
    }
  }();
  return {std::move(b), std::move(s)};
}

std::size_t grid_or(const RunConfig& cfg, std::size_t fallback) {
  const std::size_t n = cfg.grid.value_or(fallback);
  if (n < 2) throw ValidationError("--grid must be at least 2");
  return n;
}

std::optional<fs::path> out_path(const RunConfig& cfg, const char* name) {
  if (cfg.out.empty()) return std::nullopt;
  fs::create_directories(cfg.out);
  return fs::path(cfg.out) / name;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw ValidationError("cannot write " + p.string());
  return f;
}

void write_json(const fs::path& p, const json& j) { open_out(p) << j.dump(2) << '\n'; }

bool trade_floor_ever_positive(const Marginals& m) {
  // G - F is linear between knots
  std::vector<double> pts;
  for (const auto& k : m.buyer.knots()) pts.push_back(k.point);
  for (const auto& k : m.seller.knots()) pts.push_back(k.point);
  return std::any_of(pts.begin(), pts.end(), [&](double p) { return trade_floor(m.buyer, m.seller, p) > 0.0; });
}

int cmd_optimize(const RunConfig& cfg, std::ostream& out) {
  const auto m = load_marginals(cfg);
  const std::size_t grid = grid_or(cfg, 2001);
  const double refine_tol = cfg.tol.value_or(1e-10);
  const OptimizeResult r = optimize(m.buyer, m.seller, grid, refine_tol);
  const bool floor_positive = trade_floor_ever_positive(m);

  out << fmt::format("p*          {:.10g}\n", r.price);
  out << fmt::format("A           {:.10g}\n", r.value);
  const auto& a = r.analysis;
  out << fmt::format("trade floor {:.10g}\nx(p*)       {:.10g}\ny(p*)       {:.10g}\n", a.trade_floor, a.x, a.y);
  out << fmt::format("masses      a={:.6g} b={:.6g} d={:.6g} z={:.6g}\n", a.a, a.b, a.d, a.z);
  if (!floor_positive) out << "note: trade floor nonpositive at all prices\n";

  if (auto p = out_path(cfg, "optimize.json")) {
    json j = to_json(r);
    j["buyer"] = marginal_to_json(m.buyer);
    j["seller"] = marginal_to_json(m.seller);
    j["tolerances"] = {{"price_grid", grid}, {"refine_tol", refine_tol}};
    if (!floor_positive) j["note"] = "trade floor nonpositive at all prices";
    write_json(*p, j);
  }
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const auto m = load_marginals(cfg);
  const std::size_t grid = grid_or(cfg, 101);
  const auto range = price_range(m.buyer, m.seller);
  std::vector<RobustAnalysis> rows;
  for (std::size_t i = 0; i < grid; ++i) {
    const double p = i + 1 == grid ? range.hi : range.lo + (range.hi - range.lo) * static_cast<double>(i) / (grid - 1);
    rows.push_back(analyze(m.buyer, m.seller, p));
  }
  if (auto p = out_path(cfg, "sweep.csv")) {
    auto f = open_out(*p);
    write_sweep_csv(f, rows);
    out << "wrote " << p->string() << '\n';
  } else {
    write_sweep_csv(out, rows);
  }
  return kOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  const auto m = load_marginals(cfg);
  const std::size_t grid = grid_or(cfg, 400);
  const double price = cfg.price ? *cfg.price : optimize(m.buyer, m.seller).price;
  const double tol = cfg.tol.value_or(maxmin_tolerance(m.buyer, m.seller, grid));

  const GridMarginal bg = m.buyer.discretize(grid);
  const GridMarginal sg = m.seller.discretize(grid);
  const OracleResult r = min_expected_gains(bg, sg, posted_price_allocation(bg.points, sg.points, {price}));
  const double analytic = robust_efficiency(m.buyer, m.seller, price);
  const double diff = r.value - analytic;
  const bool ok = std::abs(diff) <= tol;

  out << fmt::format("price       {:.10g}\n", price);
  out << fmt::format("oracle min  {:.10g}  (grid {})\n", r.value, grid);
  out << fmt::format("analytic    {:.10g}\n", analytic);
  out << fmt::format("difference  {:.3e}  tol {:.3e}  {}\n", diff, tol, ok ? "PASS" : "FAIL");

  if (auto p = out_path(cfg, "oracle.json")) {
    write_json(*p, {{"price", price},
                    {"grid", grid},
                    {"oracle_value", r.value},
                    {"analytic_value", analytic},
                    {"difference", diff},
                    {"tolerances", {{"agreement", tol}}}});
    auto f = open_out(*out_path(cfg, "coupling.csv"));
    write_coupling_csv(f, r.coupling);
  }
  return ok ? kOk : kNumericalFailure;
}

struct Row {
  std::string name;
  double value;
  bool pass;
};

int cmd_block(const RunConfig& cfg, std::ostream& out) {
  const int n = static_cast<int>(grid_or(cfg, 8));
  const double price = cfg.price.value_or(0.5);
  if (!(price > 0.0 && price < 1.0)) throw ValidationError("--price must lie in (0, 1) for the block pipeline");
  const double tol = cfg.tol.value_or(1e-9);

  const PostedPriceMechanism pp{price, TieRule::kNoTrade};
  const BlockMechanism mech = build_block_mechanism([&](double v, double c) { return pp.allocation(v, c); }, n);
  const BudgetReport budget = budget_report(mech);
  const ProjectionReport proj = project_to_bb(mech);
  const BlockMechanism bb = u_to_mechanism(proj.u);

  const std::vector<Row> rows{
      {"ex-post monotone", 0.0, check_expost_monotone(mech.q).ok},
      {"DSIC max deviation gain", check_dsic(mech), check_dsic(mech) <= tol},
      {"EIR min payoff", check_eir(mech), check_eir(mech) >= -tol},
      {"payment identity residual", budget.identity_residual, budget.identity_residual <= tol},
      {"budget imbalance max", budget.max_abs, true},
      {"zero above diagonal", 0.0, check_obs2(mech.q)},
      {"r_n identity residual", rn_identity_residual(mech, proj.r), rn_identity_residual(mech, proj.r) <= tol},
      {"projected sum u", proj.u.sum(), proj.u.sum() <= 1.0 + tol},
      {"projected DSIC gain", check_dsic(bb), check_dsic(bb) <= tol},
      {"projected EIR payoff", check_eir(bb), check_eir(bb) >= -tol},
      {"projected imbalance", budget_report(bb).max_abs, budget_report(bb).max_abs <= tol},
  };

  bool all = true;
  out << fmt::format("posted price {} on {}x{} blocks, tol {:.1e}\n", price, n, n, tol);
  for (const auto& r : rows) {
    out << fmt::format("  {:<28}{:>14.6g}  {}\n", r.name, r.value, r.pass ? "PASS" : "FAIL");
    all = all && r.pass;
  }

  if (auto p = out_path(cfg, "block.json")) {
    write_json(*p, {{"mechanism", to_json(mech)},
                    {"u", to_json(proj.u)},
                    {"delta", proj.delta},
                    {"tolerances", {{"check", tol}}}});
  }
  return all ? kOk : kNumericalFailure;
}

int cmd_minimax(const RunConfig& cfg, std::ostream& out) {
  const auto m = load_marginals(cfg);
  const std::size_t grid = grid_or(cfg, 400);
  const MinimaxReport rep = minimax(m.buyer, m.seller, grid, cfg.refine, cfg.tol.value_or(-1.0), cfg.lift);

  out << fmt::format("p*        {:.10g}\nmaxmin    {:.10g}  (oracle {:.10g}, grid {}, tol {:.3e})\n", rep.price,
                     rep.maxmin_value, rep.oracle_value, rep.grid, rep.tolerance);
  out << fmt::format("minmax    {:.10g}  (level {})\ngap       {:.3e}\n", rep.minmax_value, rep.witness_level, rep.gap);
  out << "  n   minmax_n          best price\n";
  for (const auto& l : rep.levels) out << fmt::format("  {:<3} {:<17.10g} {:.6g}\n", l.n, l.value, l.best_price);

  if (auto p = out_path(cfg, "minimax.json")) {
    write_json(*p, to_json(rep));
    auto f = open_out(*out_path(cfg, "convergence.csv"));
    write_convergence_csv(f, rep.levels);
  }
  if (rep.gap < -1e-9) {
    out << "weak duality violated\n";
    return kNumericalFailure;
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust posted-price analysis for bilateral trade"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key-value config file supplying any of the options below");

  RunConfig cfg;
  app.add_option("--buyer", cfg.buyer, "buyer marginal: uniform:lo,hi | knots:x:F,... | JSON | file");
  app.add_option("--seller", cfg.seller, "seller marginal, same forms as --buyer");
  app.add_option("--grid", cfg.grid, "grid size (cells, prices or blocks depending on command)");
  app.add_option("--refine", cfg.refine, "refinement schedule, e.g. 1,2,4,8,16")->delimiter(',');
  app.add_option("--price", cfg.price, "posted price");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--tol", cfg.tol, "tolerance override");
  const std::map<std::string, CellLift> lifts{{"comonotone", CellLift::kComonotone}, {"product", CellLift::kProduct}};
  app.add_option("--lift", cfg.lift, "mass inside refinement cells: comonotone | product")
      ->transform(CLI::CheckedTransformer(lifts, CLI::ignore_case));

  auto* optimize_cmd = app.add_subcommand("optimize", "optimal robust posted price")->fallthrough();
  auto* sweep_cmd = app.add_subcommand("sweep", "robust efficiency over a price grid (CSV)")->fallthrough();
  auto* oracle_cmd = app.add_subcommand("oracle", "worst-case coupling by transportation LP")->fallthrough();
  auto* block_cmd = app.add_subcommand("block", "block mechanism property checks")->fallthrough();
  auto* minimax_cmd = app.add_subcommand("minimax", "max-min vs min-max over posted prices")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (optimize_cmd->parsed()) return cmd_optimize(cfg, out);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg, out);
    if (oracle_cmd->parsed()) return cmd_oracle(cfg, out);
    if (block_cmd->parsed()) return cmd_block(cfg, out);
    if (minimax_cmd->parsed()) return cmd_minimax(cfg, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalCheckError& e) {
    err << "numerical check failed: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const PreconditionError& e) {
    err << "numerical check failed: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kConfigError;
}

}  // namespace robust_trade::cli
