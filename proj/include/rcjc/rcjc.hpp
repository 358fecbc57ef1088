// rcjc.hpp — Umbrella header.
#pragma once

#include "rcjc/errors.hpp"
#include "rcjc/densecx.hpp"
#include "rcjc/hilbert.hpp"
#include "rcjc/spectral.hpp"
#include "rcjc/models.hpp"
#include "rcjc/dissipator.hpp"
#include "rcjc/transforms.hpp"
#include "rcjc/evolve.hpp"
#include "rcjc/metrics.hpp"
#include "rcjc/config.hpp"
#include "rcjc/comparison.hpp"
#include "rcjc/sweep.hpp"
#include "rcjc/validate.hpp"
