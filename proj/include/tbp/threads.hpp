#pragma once

namespace tbp {

// Worker count for the parallel kernels: OpenMP's max, capped by the
// TBP_EVAL_THREADS environment variable when set. Always >= 1.
int max_workers();

}  // namespace tbp
