#pragma once

// Umbrella header for the complete library.

#include "hoal/core.hpp"
#include "hoal/rng.hpp"
#include "hoal/normed_space.hpp"
#include "hoal/linalg.hpp"
#include "hoal/oracle.hpp"
#include "hoal/newton.hpp"
#include "hoal/conjugate.hpp"
#include "hoal/penalty.hpp"
#include "hoal/ppm.hpp"
#include "hoal/alm.hpp"
#include "hoal/certificates.hpp"
#include "hoal/problems.hpp"
#include "hoal/bench_config.hpp"
#include "hoal/bench_run.hpp"
#include "hoal/bench_svg.hpp"
