// rfiqkd.hpp
// Reference-frame-independent QKD: simulation, security bound, qutrit
// extension and photonic measurement circuits.

#pragma once

#include "linalg.hpp"
#include "qstate.hpp"
#include "channel.hpp"
#include "correlations.hpp"
#include "qutrit.hpp"
#include "protocol.hpp"
#include "security.hpp"
#include "photonic.hpp"
