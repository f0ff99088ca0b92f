#pragma once

#include "donorsim/types.hpp"
#include "donorsim/spin.hpp"
#include "donorsim/state.hpp"
#include "donorsim/linalg.hpp"
#include "donorsim/registry.hpp"
#include "donorsim/hamiltonian.hpp"
#include "donorsim/spectrum.hpp"
#include "donorsim/pulse.hpp"
#include "donorsim/noise.hpp"
#include "donorsim/dynamics.hpp"
#include "donorsim/fit.hpp"
#include "donorsim/protocols.hpp"
#include "donorsim/readout.hpp"
#include "donorsim/multiqubit.hpp"
#include "donorsim/ner.hpp"
#include "donorsim/chaos.hpp"
#include "donorsim/sensing.hpp"
#include "donorsim/cavity.hpp"
#include "donorsim/implantation.hpp"
#include "donorsim/io.hpp"
