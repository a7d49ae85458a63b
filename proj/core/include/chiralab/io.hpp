#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chiralab/continuum.hpp"
#include "chiralab/energies.hpp"
#include "chiralab/geometry.hpp"
#include "chiralab/profiles.hpp"

namespace chiralab {

/// Shortest decimal that round-trips a double (17 significant digits).
std::string format_full(double v);

/// Columnar chain format: one line per site, three components.
void write_chain(std::ostream& os, const SpinChain& chain);
/// Read back spins; spacing and boundary are supplied by the caller.
/// Throws ParseError with the offending line number.
SpinChain read_chain(std::istream& is, double spacing, Boundary boundary = Boundary::free());

/// Columnar profile format: t u1 u2 u3 w1 w2 w3 per line.
void write_profile(std::ostream& os, const ContinuumProfile& profile);
ContinuumProfile read_profile(std::istream& is);

/// Flat key=value record of an energy breakdown.
void write_breakdown(std::ostream& os, const EnergyBreakdown& b);

/// h_G table as CSV: row label, column label, value (+ asymmetry flag).
void write_hg_table(std::ostream& os, const HgTable& table);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace chiralab
