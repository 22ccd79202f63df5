#pragma once

#include "diatom/effective.hpp"
#include "diatom/electronic_model.hpp"
#include "diatom/errors.hpp"
#include "diatom/fields.hpp"
#include "diatom/floquet.hpp"
#include "diatom/perturbation.hpp"
#include "diatom/propagate.hpp"
#include "diatom/radial.hpp"
#include "diatom/rotor.hpp"
#include "diatom/scenario.hpp"
#include "diatom/spline.hpp"
#include "diatom/version.hpp"
#include "diatom/wavepacket.hpp"
