// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/parallel.hpp"

#include <omp.h>

namespace chm {

namespace {
int g_jobs = 0;
}

void set_jobs(int j) { g_jobs = j < 0 ? 0 : j; }

int jobs() { return g_jobs; }

int omp_thread_count() {
    if (g_jobs > 0) return g_jobs;
    return omp_get_max_threads();
}

} // namespace chm
