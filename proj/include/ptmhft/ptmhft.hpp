#pragma once

#include "biortho.hpp"
#include "dynamics.hpp"
#include "error.hpp"
#include "mhft.hpp"
#include "numlin.hpp"
#include "oscillator.hpp"
#include "quadrature.hpp"
#include "wang.hpp"

namespace ptmhft {

inline constexpr const char* version = "0.1.0";

} // namespace ptmhft
