#pragma once

#include "jcsim/claims.hpp"
#include "jcsim/converge.hpp"
#include "jcsim/density.hpp"
#include "jcsim/evolve.hpp"
#include "jcsim/fock.hpp"
#include "jcsim/genspec.hpp"
#include "jcsim/lindblad.hpp"
#include "jcsim/config.hpp"
#include "jcsim/run.hpp"
