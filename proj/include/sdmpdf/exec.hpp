#pragma once

namespace sdmpdf {

// Kernel execution policy.  `serial` runs the plain reference loops;
// `parallel` runs the OpenMP variants (identical arithmetic per output
// element, so results are bitwise equal for any thread count).  Builds
// without OpenMP fall back to the serial loops for both policies.
enum class Exec { serial, parallel };

}  // namespace sdmpdf
