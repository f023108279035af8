#pragma once

#include "qnet_asym/sweep.hpp"

#include <string>

namespace qnet_asym::sweep::detail {

// Address of the numeric parameter called `name`, or nullptr if it is not sweepable.
double* sweep_target(MidpointParams& p, const std::string& name);
double* sweep_target(DispersionParams& p, const std::string& name);
double* sweep_target(ChainParams& p, const std::string& name);

}  // namespace qnet_asym::sweep::detail
