#pragma once

#include <string>
#include <vector>

#include "entsim/coherence.hpp"

namespace entsim::io {

/// A scenario document: the source configuration plus the scan grids the CLI
/// commands iterate over. Versioned; unknown versions are rejected.
struct Scenario {
    int schema_version = 1;
    coherence::SourceConfig source;
    std::vector<double> lengths_mm;   // may be empty (single point at crystal.length_mm)
    std::vector<double> plate_mm;     // may be empty (use plate thickness as-is)
};

Scenario load_scenario(const std::string& path);

/// Round-trip-safe decimal rendering (17 significant digits).
std::string format_full(double v);

}  // namespace entsim::io
