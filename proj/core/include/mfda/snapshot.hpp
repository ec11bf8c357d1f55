#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mfda/spectral.hpp"

namespace mfda {

// One JSON header line followed by little-endian float64 physical samples,
// row-major (y slow), one block per component.
struct Snapshot {
  int n = 0;
  std::string kind = "velocity";
  double time = 0.0;
  double nu = 0.0;
  double gamma = 0.0;
  double p = 0.0;
  int components = 1;
  // Step size of the producing update; 0 when not applicable.
  double step = 0.0;
  std::vector<double> data;
};

Snapshot make_snapshot(const VectorField& w, const std::string& kind, double time,
                       const DissipationSymbol& d);
Snapshot make_snapshot(const SpectralField& f, const std::string& kind, double time,
                       const DissipationSymbol& d);
VectorField snapshot_vector(const Snapshot& s);
SpectralField snapshot_scalar(const Snapshot& s);

void write_snapshot(std::ostream& os, const Snapshot& s);
// Returns false on clean end of stream; throws on a malformed record.
bool read_snapshot(std::istream& is, Snapshot& s);

void save_snapshot(const std::string& path, const Snapshot& s);
Snapshot load_snapshot(const std::string& path);

}  // namespace mfda
