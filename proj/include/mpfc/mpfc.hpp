#ifndef MPFC_MPFC_HPP
#define MPFC_MPFC_HPP

#include "mpfc/elliptic.hpp"
#include "mpfc/energy.hpp"
#include "mpfc/errors.hpp"
#include "mpfc/grid.hpp"
#include "mpfc/init.hpp"
#include "mpfc/io.hpp"
#include "mpfc/model.hpp"
#include "mpfc/multigrid.hpp"
#include "mpfc/scheme.hpp"
#include "mpfc/sim.hpp"
#include "mpfc/step.hpp"
#include "mpfc/transfer.hpp"

#endif  // MPFC_MPFC_HPP
