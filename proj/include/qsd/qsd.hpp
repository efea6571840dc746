#ifndef QSD_QSD_HPP
#define QSD_QSD_HPP

#include "qsd/certify.hpp"
#include "qsd/confidence.hpp"
#include "qsd/ensemble.hpp"
#include "qsd/errors.hpp"
#include "qsd/matrix.hpp"
#include "qsd/measurement.hpp"
#include "qsd/oracle.hpp"
#include "qsd/scenario.hpp"
#include "qsd/solution.hpp"
#include "qsd/symmetric.hpp"
#include "qsd/tradeoff.hpp"
#include "qsd/two_qubit.hpp"

#endif
