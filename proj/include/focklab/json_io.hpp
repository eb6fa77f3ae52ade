#pragma once

#include <json.hpp>

#include "focklab/convolve.hpp"
#include "focklab/gaussian.hpp"
#include "focklab/lab.hpp"
#include "focklab/poincare.hpp"

namespace focklab {

using json = nlohmann::json;

/// DensityMatrix <-> {"cutoff": [N_j], "re": [[..]], "im": [[..]], "tail_mass": t}
json to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const json& j);

/// GaussianSpec -> {"d": [...], "gamma": [[...]], "nu": [...], "beta": [...]}
json to_json(const GaussianSpec& spec);

json to_json(const ConvolutionReport& report);
json to_json(const GapEstimate& estimate);

/// State specs as accepted by the CLI:
///   {"kind":"pure","cutoff":[3],"amplitudes":{"0":[1,0],"3":[1,0]}}
///   {"kind":"thermal","cutoff":[20],"nu":[2.0]}
///   {"kind":"mixture","components":[{"weight":0.5,"state":{...}}, ...]}
StateSpec state_spec_from_json(const json& j);

ExperimentConfig experiment_config_from_json(const json& j);

json load_json_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& text);

}  // namespace focklab
