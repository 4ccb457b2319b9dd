#pragma once

// Umbrella header: concave distortion semigroups, Choquet evaluation,
// acceptability indices, generator recovery, property diagnostics, and
// portfolio direction optimization.

#include "distortia/acceptability.hpp"
#include "distortia/choquet.hpp"
#include "distortia/csv.hpp"
#include "distortia/distortion.hpp"
#include "distortia/errors.hpp"
#include "distortia/family.hpp"
#include "distortia/generator.hpp"
#include "distortia/logarithm.hpp"
#include "distortia/normal.hpp"
#include "distortia/portfolio.hpp"
#include "distortia/properties.hpp"
#include "distortia/quadrature.hpp"
#include "distortia/semigroup.hpp"
#include "distortia/spec_grammar.hpp"
