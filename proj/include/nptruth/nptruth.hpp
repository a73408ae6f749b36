#pragma once

// Umbrella header: the whole library in one include.

#include "nptruth/version.hpp"
#include "nptruth/errors.hpp"
#include "nptruth/rng.hpp"
#include "nptruth/roots.hpp"
#include "nptruth/quadrature.hpp"
#include "nptruth/dist.hpp"
#include "nptruth/np.hpp"
#include "nptruth/models.hpp"
#include "nptruth/belief.hpp"
#include "nptruth/sequential.hpp"
#include "nptruth/bias.hpp"
#include "nptruth/los.hpp"
#include "nptruth/io.hpp"
#include "nptruth/cli.hpp"
