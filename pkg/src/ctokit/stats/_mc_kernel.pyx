# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte-Carlo permutation kernel.

Mirrors _mc_fallback bit for bit: same splitmix64 replicate streams, same
Fisher-Yates draw sequence, same row-major chi-squared accumulation order.
"""
from libc.stdint cimport int32_t, int64_t, uint64_t
from libc.stdlib cimport free, malloc


cdef uint64_t GAMMA = <uint64_t> 0x9E3779B97F4A7C15
cdef uint64_t M1 = <uint64_t> 0xBF58476D1CE4E5B9
cdef uint64_t M2 = <uint64_t> 0x94D049BB133111EB


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * M1
    z = (z ^ (z >> 27)) * M2
    return z ^ (z >> 31)


def count_exceedances(
    const int32_t[::1] row_labels,
    const int32_t[::1] col_labels,
    const double[::1] expected,
    double threshold,
    long iterations,
    unsigned long long seed,
    int n_rows,
    int n_cols,
):
    """Count replicates with chi2 >= threshold; also returns the chi2 sum."""
    cdef Py_ssize_t n = row_labels.shape[0]
    cdef int cells = n_rows * n_cols
    cdef int64_t exceed = 0
    cdef double chi2_sum = 0.0
    cdef double chi2, d, e
    cdef uint64_t base, x
    cdef long r
    cdef Py_ssize_t i, k, pos
    cdef uint64_t j
    cdef int c
    cdef int32_t tmp

    cdef int32_t* perm = <int32_t*> malloc(n * sizeof(int32_t))
    cdef double* counts = <double*> malloc(cells * sizeof(double))
    if perm == NULL or counts == NULL:
        free(perm)
        free(counts)
        raise MemoryError()

    try:
        with nogil:
            for r in range(iterations):
                base = mix64(seed + (<uint64_t> (r + 1)) * GAMMA)

                for i in range(n):
                    perm[i] = <int32_t> i
                for k in range(n - 1):
                    i = n - 1 - k
                    x = mix64(base + (<uint64_t> (k + 1)) * GAMMA)
                    j = x % (<uint64_t> (i + 1))
                    tmp = perm[i]
                    perm[i] = perm[<Py_ssize_t> j]
                    perm[<Py_ssize_t> j] = tmp

                for c in range(cells):
                    counts[c] = 0.0
                for pos in range(n):
                    counts[row_labels[perm[pos]] * n_cols + col_labels[pos]] += 1.0

                chi2 = 0.0
                for c in range(cells):
                    e = expected[c]
                    d = counts[c] - e
                    chi2 = chi2 + d * d / e
                if chi2 >= threshold:
                    exceed += 1
                chi2_sum += chi2
    finally:
        free(perm)
        free(counts)

    return int(exceed), chi2_sum
