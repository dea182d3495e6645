#include "netrisk/netrisk.hpp"

namespace netrisk {

const char* version() noexcept { return NETRISK_VERSION; }

}  // namespace netrisk
