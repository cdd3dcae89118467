#pragma once

#include "fermispec/dense_matrix.hpp"
#include "fermispec/disorder.hpp"
#include "fermispec/ensemble.hpp"
#include "fermispec/errors.hpp"
#include "fermispec/fock_oracle.hpp"
#include "fermispec/jacobi.hpp"
#include "fermispec/lattice.hpp"
#include "fermispec/model.hpp"
#include "fermispec/modes.hpp"
#include "fermispec/normal.hpp"
#include "fermispec/report.hpp"
#include "fermispec/serialize.hpp"
#include "fermispec/spectrum.hpp"
#include "fermispec/stats.hpp"
#include "fermispec/version.hpp"
