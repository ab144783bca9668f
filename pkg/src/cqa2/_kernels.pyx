# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``; same signatures."""
from array import array

from libc.stdlib cimport calloc, free, malloc


def find_falsifying(block_start, adj_start, adj, dead, long long node_limit):
    cdef int m = len(block_start) - 1
    if m == 0:
        return 1, []
    cdef int[::1] bs = array("i", block_start)
    cdef int[::1] ast = array("i", adj_start)
    cdef int[::1] ad = array("i", adj) if len(adj) else array("i", [0])
    cdef int n = bs[m]
    cdef unsigned char[::1] dd = bytearray(dead) if n else bytearray(1)
    cdef int *block = <int *> malloc(max(n, 1) * sizeof(int))
    cdef int *kill = <int *> calloc(max(n, 1), sizeof(int))
    cdef int *alive = <int *> calloc(m, sizeof(int))
    cdef int *choice = <int *> malloc(m * sizeof(int))
    cdef int *stack_b = <int *> malloc(m * sizeof(int))
    cdef int *stack_pos = <int *> malloc(m * sizeof(int))
    cdef int b, i, c, t, j, end, nb, best_alive, top = 0, status = 0
    cdef long long nodes = 0
    try:
        for b in range(m):
            choice[b] = -1
            for i in range(bs[b], bs[b + 1]):
                block[i] = b
                if not dd[i]:
                    alive[b] += 1

        nb = _select(m, choice, alive, n)
        if alive[nb] == 0:
            return 0, None
        stack_b[0] = nb
        stack_pos[0] = bs[nb]
        top = 1
        while True:
            b = stack_b[top - 1]
            if choice[b] >= 0:
                c = choice[b]
                for t in range(ast[c], ast[c + 1]):
                    j = ad[t]
                    kill[j] -= 1
                    if kill[j] == 0 and not dd[j]:
                        alive[block[j]] += 1
                choice[b] = -1
            c = stack_pos[top - 1]
            end = bs[b + 1]
            while c < end and (dd[c] or kill[c]):
                c += 1
            if c == end:
                top -= 1
                if top == 0:
                    return 0, None
                continue
            stack_pos[top - 1] = c + 1
            nodes += 1
            if nodes > node_limit:
                return -1, None
            for t in range(ast[c], ast[c + 1]):
                j = ad[t]
                kill[j] += 1
                if kill[j] == 1 and not dd[j]:
                    alive[block[j]] -= 1
            choice[b] = c
            nb = _select(m, choice, alive, n)
            if nb < 0:
                return 1, [choice[i] for i in range(m)]
            if alive[nb] == 0:
                continue
            stack_b[top] = nb
            stack_pos[top] = bs[nb]
            top += 1
    finally:
        free(block)
        free(kill)
        free(alive)
        free(choice)
        free(stack_b)
        free(stack_pos)


cdef inline int _select(int m, int *choice, int *alive, int n) nogil:
    cdef int b, best = -1, best_alive = n + 1
    for b in range(m):
        if choice[b] < 0 and alive[b] < best_alive:
            best = b
            best_alive = alive[b]
    return best


def delta_dense(sizes, int k, sol, bint stop_on_empty):
    cdef int m = len(sizes)
    cdef int[::1] sz = array("i", sizes) if m else array("i", [0])
    cdef int n = sum(sizes)
    cdef const unsigned char[::1] sl = bytes(sol) if n else b"\0"
    cdef long long N = 1
    cdef int b, b2, j, j2, x, y, cnt, u
    for b in range(m):
        N *= sz[b] + 1
    cdef long long *stride = <long long *> malloc((m + 1) * sizeof(long long))
    cdef int *start = <int *> malloc(max(m, 1) * sizeof(int))
    cdef int *digits = <int *> calloc(max(m, 1), sizeof(int))
    cdef int *chosen = <int *> malloc(max(m, 1) * sizeof(int))
    cdef unsigned char *pc = <unsigned char *> malloc(N)
    cdef unsigned char *cov = <unsigned char *> calloc(N * max(n, 1), 1)
    cdef unsigned char *count = <unsigned char *> calloc(N * max(m, 1), 1)
    cdef long long *work = <long long *> malloc(N * sizeof(long long))
    reason_arr = array("i", bytes(4 * N))
    cdef int[::1] reason = reason_arr
    cdef long long I, T, S0, S, rest, head = 0, tail = 0
    cdef bint hit, full
    try:
        if cov == NULL or count == NULL or work == NULL or pc == NULL:
            raise MemoryError("dense k-set table too large")
        stride[0] = 1
        for b in range(m):
            stride[b + 1] = stride[b] * (sz[b] + 1)
            start[b] = 0 if b == 0 else start[b - 1] + sz[b - 1]
        for I in range(N):
            if I:
                b = 0
                while digits[b] == sz[b]:
                    digits[b] = 0
                    b += 1
                digits[b] += 1
            cnt = 0
            for b in range(m):
                if digits[b]:
                    chosen[cnt] = start[b] + digits[b] - 1
                    cnt += 1
            pc[I] = cnt
            if cnt > k:
                continue
            hit = False
            for x in range(cnt):
                for y in range(cnt):
                    if sl[chosen[x] * n + chosen[y]]:
                        hit = True
                        break
                if hit:
                    break
            if hit:
                reason[I] = 1
                work[tail] = I
                tail += 1

        while head < tail:
            if stop_on_empty and reason[0]:
                break
            T = work[head]
            head += 1
            full = pc[T] == k
            rest = T
            for b in range(m):
                digits[b] = rest % (sz[b] + 1)
                rest //= sz[b] + 1
            for b in range(m):
                j = digits[b]
                if not j:
                    continue
                u = start[b] + j - 1
                S0 = T - j * stride[b]
                tail = _mark(S0, u, b, reason, cov, count, sz, n, m, work, tail)
                if full:
                    for b2 in range(m):
                        if b2 == b or digits[b2]:
                            continue
                        for j2 in range(1, sz[b2] + 1):
                            S = S0 + j2 * stride[b2]
                            tail = _mark(S, u, b, reason, cov, count, sz, n, m, work, tail)
        return reason_arr
    finally:
        free(stride)
        free(start)
        free(digits)
        free(chosen)
        free(pc)
        free(cov)
        free(count)
        free(work)


cdef inline long long _mark(long long S, int u, int b, int[::1] reason, unsigned char *cov,
                            unsigned char *count, int[::1] sz, int n, int m,
                            long long *work, long long tail):
    if reason[S] or cov[S * n + u]:
        return tail
    cov[S * n + u] = 1
    count[S * m + b] += 1
    if count[S * m + b] == sz[b]:
        reason[S] = 2 + b
        work[tail] = S
        tail += 1
    return tail
