"""Pure-Python versions of the hot kernels.

Both kernels work on integer-encoded databases: facts are numbered block by
block, ``block_start[b]:block_start[b+1]`` being the facts of block ``b``.
``_kernels.pyx`` implements the same two functions with the same contracts.
"""


def find_falsifying(block_start, adj_start, adj, dead, node_limit):
    """Backtracking search for a repair with no solution pair.

    ``adj[adj_start[i]:adj_start[i+1]]`` lists the facts forming a solution
    with fact ``i`` (either direction, ``i`` excluded). ``dead[i]`` marks facts
    that can never be picked (self-solutions, pruned facts).

    Returns ``(1, choice)`` with one fact id per block, ``(0, None)`` when no
    falsifying repair exists, ``(-1, None)`` when ``node_limit`` was hit.
    """
    m = len(block_start) - 1
    if m == 0:
        return 1, []
    n = block_start[m]
    block = [0] * n
    for b in range(m):
        for i in range(block_start[b], block_start[b + 1]):
            block[i] = b
    kill = [0] * n
    alive = [sum(1 for i in range(block_start[b], block_start[b + 1]) if not dead[i]) for b in range(m)]
    choice = [-1] * m

    def apply(c, delta):
        for t in range(adj_start[c], adj_start[c + 1]):
            j = adj[t]
            if delta > 0:
                kill[j] += 1
                if kill[j] == 1 and not dead[j]:
                    alive[block[j]] -= 1
            else:
                kill[j] -= 1
                if kill[j] == 0 and not dead[j]:
                    alive[block[j]] += 1

    def select():
        best, best_alive = -1, n + 1
        for b in range(m):
            if choice[b] < 0 and alive[b] < best_alive:
                best, best_alive = b, alive[b]
        return best

    first = select()
    if alive[first] == 0:
        return 0, None
    stack_b = [first]
    stack_pos = [block_start[first]]
    nodes = 0
    while True:
        b = stack_b[-1]
        if choice[b] >= 0:
            apply(choice[b], -1)
            choice[b] = -1
        c = stack_pos[-1]
        end = block_start[b + 1]
        while c < end and (dead[c] or kill[c]):
            c += 1
        if c == end:
            stack_b.pop()
            stack_pos.pop()
            if not stack_b:
                return 0, None
            continue
        stack_pos[-1] = c + 1
        nodes += 1
        if nodes > node_limit:
            return -1, None
        apply(c, 1)
        choice[b] = c
        nb = select()
        if nb < 0:
            return 1, list(choice)
        if alive[nb] == 0:
            continue
        stack_b.append(nb)
        stack_pos.append(block_start[nb])


def delta_dense(sizes, k, sol, stop_on_empty):
    """Least fixpoint of the greedy k-set rules over a mixed-radix index.

    A k-set is encoded as ``sum(c[b] * stride[b])`` with ``c[b] = 0`` for "no
    fact from block b" and ``c[b] = j`` for the j-th fact of block b.
    ``sol[i * n + j]`` is 1 iff (fact i, fact j) is a solution (i == j allowed).

    Returns a list ``reason`` over all indices: 0 = not derived, 1 = contains
    a solution, ``2 + b`` = derived by the block rule on block ``b``.
    """
    m = len(sizes)
    n = sum(sizes)
    stride = [1] * (m + 1)
    for b in range(m):
        stride[b + 1] = stride[b] * (sizes[b] + 1)
    N = stride[m]
    start = [0] * m
    for b in range(1, m):
        start[b] = start[b - 1] + sizes[b - 1]

    pc = bytearray(N)
    reason = [0] * N
    work = []
    digits = [0] * m
    for I in range(N):
        if I:
            b = 0
            while digits[b] == sizes[b]:
                digits[b] = 0
                b += 1
            digits[b] += 1
        chosen = [start[b] + digits[b] - 1 for b in range(m) if digits[b]]
        pc[I] = len(chosen)
        if len(chosen) > k:
            continue
        hit = False
        for x in chosen:
            row = x * n
            for y in chosen:
                if sol[row + y]:
                    hit = True
                    break
            if hit:
                break
        if hit:
            reason[I] = 1
            work.append(I)

    cov = bytearray(N * n)
    count = bytearray(N * m)

    def mark(S, u, b):
        if reason[S] or cov[S * n + u]:
            return
        cov[S * n + u] = 1
        count[S * m + b] += 1
        if count[S * m + b] == sizes[b]:
            reason[S] = 2 + b
            work.append(S)

    head = 0
    while head < len(work):
        if stop_on_empty and reason[0]:
            break
        T = work[head]
        head += 1
        full = pc[T] == k
        rest = T
        tdig = [0] * m
        for b in range(m):
            rest, tdig[b] = divmod(rest, sizes[b] + 1)
        for b in range(m):
            j = tdig[b]
            if not j:
                continue
            u = start[b] + j - 1
            S0 = T - j * stride[b]
            mark(S0, u, b)
            if full:
                for b2 in range(m):
                    if b2 == b or tdig[b2]:
                        continue
                    for j2 in range(1, sizes[b2] + 1):
                        mark(S0 + j2 * stride[b2], u, b)
    return reason
