#pragma once

#include "mechcert/burnin.hpp"
#include "mechcert/certificates.hpp"
#include "mechcert/config.hpp"
#include "mechcert/csv.hpp"
#include "mechcert/error.hpp"
#include "mechcert/prior.hpp"
#include "mechcert/rng.hpp"
#include "mechcert/shift.hpp"
#include "mechcert/sim.hpp"
#include "mechcert/sweep.hpp"
