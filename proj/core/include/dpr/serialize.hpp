#pragma once

#include <string>

#include "dpr/phaseless.hpp"

namespace dpr {

// Flat binary formats with a dims header and row-major weight blocks.
// Round-trips are bitwise exact.
void save_net(const GeneratorNet& net, const std::string& path);
GeneratorNet load_net(const std::string& path);

void save_ensemble(const MeasurementEnsemble& ensemble, const std::string& path);
MeasurementEnsemble load_ensemble(const std::string& path);

// CSV with a single `b_i` column.
std::string observation_to_csv(const PhaselessObservation& obs);

struct SerializeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dpr
