#pragma once

#include <string>
#include <vector>

#include "meshnet/codesign/topology.hpp"
#include "meshnet/tolerance.hpp"

namespace meshnet::codesign {

/// Contents of a gains file.
struct GainsDocument {
  TopologySolution solution;
  std::string backend;
  ToleranceConfig tol;
};

/// Serializes per-agent certificates, per-link blocks (self blocks included)
/// and global data. Doubles round-trip exactly.
std::string gains_to_json(const GainsDocument& doc);
GainsDocument gains_from_json(const std::string& text);

/// File variants; throw kIoError or kParseError.
void write_gains(const GainsDocument& doc, const std::string& path);
GainsDocument read_gains(const std::string& path);

/// Local certificates only (the synth-local output).
std::string local_profiles_to_json(const std::vector<AgentCertificate>& agents,
                                   const std::string& backend);
std::vector<AgentCertificate> local_profiles_from_json(const std::string& text);

/// Whole-file helpers shared with the harness.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace meshnet::codesign
