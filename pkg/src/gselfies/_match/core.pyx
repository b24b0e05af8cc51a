# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled induced-subgraph embedding search.

Mirrors gselfies.matcher.enumerate_embeddings_pure exactly: same search
plan, same candidate iteration order, same result order.
"""

from cpython cimport array
import array


cdef inline int _bond_order_between(int u, int v, int[::1] m_start,
                                    int[::1] m_nbr, int[::1] m_ord) nogil:
    cdef int k
    for k in range(m_start[u], m_start[u + 1]):
        if m_nbr[k] == v:
            return m_ord[k]
    return 0


def enumerate_embeddings(int t_n, list order, list t_attr, list t_deg,
                         list anchor, list req_start, list req_depth,
                         list req_order, int m_n, list m_attr, list m_deg,
                         list m_adj_start, list m_adj_nbr, list m_adj_order,
                         list forbidden):
    if t_n == 0 or t_n > m_n:
        return []
    cdef array.array order_a = array.array('i', order)
    cdef array.array t_attr_a = array.array('i', t_attr)
    cdef array.array t_deg_a = array.array('i', t_deg)
    cdef array.array anchor_a = array.array('i', anchor)
    cdef array.array req_start_a = array.array('i', req_start)
    cdef array.array req_depth_a = array.array('i', req_depth if req_depth else [0])
    cdef array.array req_order_a = array.array('i', req_order if req_order else [0])
    cdef array.array m_attr_a = array.array('i', m_attr)
    cdef array.array m_deg_a = array.array('i', m_deg)
    cdef array.array m_start_a = array.array('i', m_adj_start)
    cdef array.array m_nbr_a = array.array('i', m_adj_nbr if m_adj_nbr else [0])
    cdef array.array m_ord_a = array.array('i', m_adj_order if m_adj_order else [0])
    cdef array.array forbidden_a = array.array('i', forbidden)

    cdef int[::1] t_order = order_a
    cdef int[::1] attr_t = t_attr_a
    cdef int[::1] deg_t = t_deg_a
    cdef int[::1] anchor_v = anchor_a
    cdef int[::1] rstart = req_start_a
    cdef int[::1] rdepth = req_depth_a
    cdef int[::1] rorder = req_order_a
    cdef int[::1] attr_m = m_attr_a
    cdef int[::1] deg_m = m_deg_a
    cdef int[::1] m_start = m_start_a
    cdef int[::1] m_nbr = m_nbr_a
    cdef int[::1] m_ord = m_ord_a
    cdef int[::1] forb = forbidden_a

    cdef array.array assign_a = array.array('i', [-1] * t_n)
    cdef array.array used_a = array.array('i', [0] * m_n)
    cdef array.array cursor_a = array.array('i', [0] * t_n)
    cdef array.array pool_lo_a = array.array('i', [0] * t_n)
    cdef array.array pool_hi_a = array.array('i', [0] * t_n)
    cdef array.array pool_csr_a = array.array('i', [0] * t_n)
    cdef int[::1] assignment = assign_a
    cdef int[::1] used = used_a
    cdef int[::1] cursor = cursor_a
    cdef int[::1] pool_lo = pool_lo_a
    cdef int[::1] pool_hi = pool_hi_a
    cdef int[::1] pool_csr = pool_csr_a  # 1: pool indexes m_nbr, 0: atom range

    results = []
    cdef int depth = 0
    cdef int u, k, v, lo, hi, mapped, want, got, anc, d
    cdef bint advanced, ok

    # set up depth-0 pool
    anc = anchor_v[0]
    if anc < 0:
        pool_lo[0] = 0
        pool_hi[0] = m_n
        pool_csr[0] = 0
    cursor[0] = pool_lo[0]

    while depth >= 0:
        advanced = False
        while cursor[depth] < pool_hi[depth]:
            if pool_csr[depth]:
                u = m_nbr[cursor[depth]]
            else:
                u = cursor[depth]
            cursor[depth] += 1
            # feasibility
            if used[u] or forb[u]:
                continue
            if attr_m[u] != attr_t[depth] or deg_m[u] < deg_t[depth]:
                continue
            lo = rstart[depth]
            hi = rstart[depth + 1]
            mapped = 0
            for k in range(m_start[u], m_start[u + 1]):
                if used[m_nbr[k]]:
                    mapped += 1
            if mapped != hi - lo:
                continue
            ok = True
            for k in range(lo, hi):
                v = assignment[rdepth[k]]
                want = rorder[k]
                got = _bond_order_between(u, v, m_start, m_nbr, m_ord)
                if got != want:
                    ok = False
                    break
            if not ok:
                continue
            assignment[depth] = u
            used[u] = 1
            if depth + 1 == t_n:
                mapping = [0] * t_n
                for d in range(t_n):
                    mapping[t_order[d]] = assignment[d]
                results.append(tuple(mapping))
                used[u] = 0
                assignment[depth] = -1
                continue
            depth += 1
            anc = anchor_v[depth]
            if anc < 0:
                pool_lo[depth] = 0
                pool_hi[depth] = m_n
                pool_csr[depth] = 0
            else:
                v = assignment[anc]
                pool_lo[depth] = m_start[v]
                pool_hi[depth] = m_start[v + 1]
                pool_csr[depth] = 1
            cursor[depth] = pool_lo[depth]
            advanced = True
            break
        if advanced:
            continue
        depth -= 1
        if depth >= 0:
            u = assignment[depth]
            used[u] = 0
            assignment[depth] = -1
    return results
