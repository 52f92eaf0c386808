#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "robust_trade/block_mechanism.hpp"
#include "robust_trade/coupling.hpp"
#include "robust_trade/marginals.hpp"
#include "robust_trade/minimax.hpp"
#include "robust_trade/posted_price.hpp"

namespace robust_trade {

using nlohmann::json;

/// {"family": "uniform", "lo": a, "hi": b} or {"knots": [[x, F], ...]}.
/// Throws ValidationError.
MarginalDistribution marginal_from_json(const json& j);
json marginal_to_json(const MarginalDistribution& m);

/// Accepts inline JSON, "uniform:lo,hi", "knots:x:F,x:F,..." or a path to a
/// JSON file.
MarginalDistribution parse_marginal_spec(const std::string& spec);

/// Shortest round-tripping decimal form.
std::string format_double(double x);

/// row,col,v,c,mass for every nonzero cell.
void write_coupling_csv(std::ostream& os, const GridCoupling& h);
/// Dimensions are inferred from the largest indices present.
GridCoupling read_coupling_csv(std::istream& is);

json coupling_to_json(const GridCoupling& h);
GridCoupling coupling_from_json(const json& j);

json to_json(const RobustAnalysis& a);
json to_json(const OptimizeResult& r);
json to_json(const BlockTable& t);
json to_json(const BlockMechanism& m);
BlockMechanism block_mechanism_from_json(const json& j);
json to_json(const PostedPriceVector& u);
PostedPriceVector posted_price_vector_from_json(const json& j);
json to_json(const MinimaxReport& r);

/// p,ell_p,x_p,y_p,eff
void write_sweep_csv(std::ostream& os, const std::vector<RobustAnalysis>& rows);
/// n,minmax_n
void write_convergence_csv(std::ostream& os, const std::vector<MinimaxLevel>& levels);

}  // namespace robust_trade
