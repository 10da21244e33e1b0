#pragma once

namespace dynsym {

// Kernels that loop over grid points or samples take one of these. The
// serial path is the reference; parallel must give bit-identical results.
enum class Execution { serial, parallel };

}  // namespace dynsym
