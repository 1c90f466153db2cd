#include "mimoae/nn.hpp"

#include <cstdlib>

extern "C" void openblas_set_num_threads(int);

namespace {

// The VMs this runs on report a generic CPU model string, which defeats
// OpenBLAS's runtime kernel detection and silently drops dgemm throughput by
// about 5x. Pin the kernel family from the instruction set instead. Priority
// 101 runs before OpenBLAS's own initializer, and setenv with overwrite=0
// keeps any explicit user override. Threading defaults to 1 so results are
// bit-reproducible; set_blas_threads opts into more.
__attribute__((constructor(101))) void pin_blas_kernel() {
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx512f"))
        setenv("OPENBLAS_CORETYPE", "SKYLAKEX", 0);
    else if (__builtin_cpu_supports("avx2"))
        setenv("OPENBLAS_CORETYPE", "HASWELL", 0);
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
}

} // namespace

namespace mimoae {

void set_blas_threads(int n) {
    if (n < 1) n = 1;
    openblas_set_num_threads(n);
}

} // namespace mimoae
