#pragma once

#include "core.hpp"
#include "errors.hpp"
#include "families.hpp"
#include "fixed_energy.hpp"
#include "forward.hpp"
#include "fourier.hpp"
#include "gelfand_levitan.hpp"
#include "json_io.hpp"
#include "krein.hpp"
#include "marchenko.hpp"
#include "numerics.hpp"
#include "pipeline.hpp"
#include "quarkonium.hpp"
#include "riemann.hpp"
#include "special.hpp"
#include "types.hpp"
#include "wave_reduction.hpp"
