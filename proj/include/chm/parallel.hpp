// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_PARALLEL_HPP_
#define CHM_PARALLEL_HPP_

namespace chm {

// Worker cap for the OpenMP kernels. 0 = use the OpenMP default.
// Every kernel computes each output element on exactly one thread with a
// fixed inner loop order, so results are identical for any thread count.
void set_jobs(int jobs);
int jobs();

// Value to pass to `num_threads` clauses.
int omp_thread_count();

} // namespace chm

#endif // CHM_PARALLEL_HPP_
