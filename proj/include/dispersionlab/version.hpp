#pragma once

#define DISPERSIONLAB_VERSION "0.1.0"

namespace dispersionlab {
inline const char* version() { return DISPERSIONLAB_VERSION; }
}
