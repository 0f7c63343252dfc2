// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace mlmcmc {

inline constexpr const char* kVersionString = "0.1.0";

}  // namespace mlmcmc
