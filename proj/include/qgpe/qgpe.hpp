#ifndef QGPE_QGPE_HPP
#define QGPE_QGPE_HPP

#include "qgpe/bdg.hpp"
#include "qgpe/checkpoint.hpp"
#include "qgpe/cmps.hpp"
#include "qgpe/linalg.hpp"
#include "qgpe/ode.hpp"
#include "qgpe/oracle.hpp"
#include "qgpe/tdvp.hpp"
#include "qgpe/transfer.hpp"
#include "qgpe/types.hpp"

#endif
