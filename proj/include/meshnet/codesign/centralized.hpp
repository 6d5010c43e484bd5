#pragma once

#include <map>
#include <set>
#include <vector>

#include "meshnet/codesign/topology.hpp"
#include "meshnet/lmi/problem.hpp"

namespace meshnet::codesign {

/// Allowed links: row agent i may hold K_ij for every j in adjacency[i].
using Adjacency = std::map<int, std::set<int>>;

struct CodesignOptions {
  CodesignCosts costs;
  /// Link blocks whose entries are all below this magnitude are dropped; the
  /// constraints are re-verified and pruning is undone if they fail.
  double prune_tol{1e-6};
  lmi::SolverOptions solver;
};

/// Centralized co-design of interconnection gains and topology over all
/// agents at once. Throws kInfeasible, kNumericalFailure, kUnknownAgent
/// for adjacency links to absent agents and kInvalidArgument.
TopologySolution centralized_codesign(const std::vector<AgentCertificate>& agents,
                                      const Adjacency& adjacency,
                                      const CodesignOptions& options = {});

/// Drops link blocks whose entries are all below @p tol in magnitude (never
/// the self blocks) and keeps K_ii fixed by recomputing K_i0. A non-positive
/// @p tol drops nothing. Returns the number of dropped blocks.
int prune_links(TopologySolution* solution, double tol);

}  // namespace meshnet::codesign
