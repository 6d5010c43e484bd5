#pragma once

#include <string>
#include <vector>

#include "meshnet/harness/metrics.hpp"
#include "meshnet/harness/simulation.hpp"

namespace meshnet::harness {

/// Column names of timeseries.csv, in order.
const std::vector<std::string>& timeseries_columns();

/// Writes every @p every-th step of @p output (the first and last step are
/// always kept) with %.17g formatting. Throws kIoError.
void write_timeseries_csv(const SimOutput& output, const std::string& path, int every = 1);

/// Reads a file written by write_timeseries_csv. Gains, start times and
/// events are not part of the file; start times are the first row per agent.
/// Throws kIoError or kParseError (wrong header, bad number, short row).
SimOutput read_timeseries_csv(const std::string& path);

std::string metrics_to_json(const Metrics& metrics);
Metrics metrics_from_json(const std::string& text);

std::string events_to_json(const std::vector<EventRecord>& events);

/// One line per agent: id, start, sup norms, band entry, weak coupling, ISS
/// residual.
std::string metrics_table_csv(const Metrics& metrics);

/// Whitespace-separated tables for plotting, one block per agent separated by
/// two blank lines: positions.dat (t x y z x_d y_d z_d), velocities.dat
/// (t v v_d), outer_errors.dat (t e_x e_v |[e_x; e_v]|) and inner_errors.dat
/// (t e_R e_Omega |[e_R; e_Omega]|). Returns the written paths.
std::vector<std::string> write_plotdata(const SimOutput& output, const std::string& dir);

/// Writes timeseries.csv, metrics.json, events.json, gains.json (final gains)
/// and gains_initial.json into @p dir, creating it.
void write_run_outputs(const SimOutput& output, const Metrics& metrics,
                       const std::string& backend, const std::string& dir, int every = 1);

}  // namespace meshnet::harness
