#pragma once

namespace mfgdc {

/// Worker count for data-parallel loops: MFGDC_THREADS if set and positive,
/// otherwise the OpenMP default. Reductions never depend on this value.
int worker_count();

}  // namespace mfgdc
