#pragma once

#include "netrisk/balance_sheet.hpp"
#include "netrisk/contagion.hpp"
#include "netrisk/errors.hpp"
#include "netrisk/netgen.hpp"
#include "netrisk/network_io.hpp"
#include "netrisk/stress.hpp"
#include "netrisk/sweep_io.hpp"

namespace netrisk {

// Library version string, e.g. "0.3.0".
const char* version() noexcept;

}  // namespace netrisk
