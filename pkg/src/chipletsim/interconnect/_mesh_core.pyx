# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled mesh kernel. Same model and cycle order as ``_mesh_py.run``."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, calloc, free

from ..errors import DeadlockDetected

cnp.import_array()

cdef int OPP[5]
OPP[:] = [0, 2, 1, 4, 3]


cdef long long _sim(const cnp.int64_t[::1] src, const cnp.int64_t[::1] dst, const cnp.int64_t[::1] ts,
                    cnp.int64_t[::1] lat, int cols, int rows, int depth, int t_r, int t_l,
                    int flits, long long watchdog, long long *hops_out, long long *makespan_out) nogil:
    cdef int R = cols * rows
    cdef Py_ssize_t P = src.shape[0]
    cdef int NP = R * 5
    cdef Py_ssize_t p, k
    cdef int r, i, j, o, gi, li, base, x, y, n, up, f, last = flits - 1
    cdef long long t = 0, last_progress = 0, nxt, c, makespan = 0, hops = 0
    cdef Py_ssize_t done = 0, in_net = 0
    cdef bint progress, any_ready

    # injection queues: packets grouped by source in trace order
    cdef Py_ssize_t *qstart = <Py_ssize_t *> calloc(R + 1, sizeof(Py_ssize_t))
    cdef Py_ssize_t *qpos = <Py_ssize_t *> calloc(R, sizeof(Py_ssize_t))
    cdef Py_ssize_t *order = <Py_ssize_t *> malloc(P * sizeof(Py_ssize_t))
    cdef int *qflit = <int *> calloc(R, sizeof(int))
    # input buffers (ports 1..4 used) as rings of `depth` entries
    cdef long long *bp = <long long *> malloc(NP * depth * sizeof(long long))
    cdef int *bf = <int *> malloc(NP * depth * sizeof(int))
    cdef long long *bt = <long long *> malloc(NP * depth * sizeof(long long))
    cdef int *bhead = <int *> calloc(NP, sizeof(int))
    cdef int *bcount = <int *> calloc(NP, sizeof(int))
    cdef int *credits = <int *> malloc(NP * sizeof(int))
    cdef int *lock = <int *> malloc(NP * sizeof(int))
    cdef int *rr = <int *> malloc(NP * sizeof(int))
    # pending credit returns, FIFO ordered by arrival time
    cdef Py_ssize_t pcap = <Py_ssize_t> NP * (t_l + 2) + 8
    cdef long long *pt = <long long *> malloc(pcap * sizeof(long long))
    cdef int *pi = <int *> malloc(pcap * sizeof(int))
    cdef Py_ssize_t phead = 0, pcount = 0
    cdef int *dxs = <int *> malloc(P * sizeof(int))
    cdef int *dys = <int *> malloc(P * sizeof(int))
    cdef long long hp[5]
    cdef int hf[5]
    cdef int routes[5]
    cdef bint has[5]
    cdef bint used[5]
    cdef int step[5]
    cdef long long status = 0

    step[0] = 0
    step[1] = 1
    step[2] = -1
    step[3] = cols
    step[4] = -cols

    for p in range(P):
        qstart[src[p] + 1] += 1
        dxs[p] = dst[p] % cols
        dys[p] = dst[p] // cols
    for r in range(R):
        qstart[r + 1] += qstart[r]
    for r in range(R):
        qpos[r] = qstart[r]
    for p in range(P):
        order[qpos[src[p]]] = p
        qpos[src[p]] += 1
    for r in range(R):
        qpos[r] = qstart[r]
    for k in range(NP):
        credits[k] = depth
        lock[k] = -1
        rr[k] = 4

    while done < P:
        if in_net == 0:
            nxt = -1
            for r in range(R):
                if qpos[r] < qstart[r + 1]:
                    c = ts[order[qpos[r]]] + t_r
                    if nxt < 0 or c < nxt:
                        nxt = c
            if nxt > t:
                t = nxt
                last_progress = t
        while pcount > 0 and pt[phead] <= t:
            credits[pi[phead]] += 1
            phead = (phead + 1) % pcap
            pcount -= 1

        progress = False
        for r in range(R):
            base = r * 5
            x = r % cols
            y = r // cols
            any_ready = False
            has[0] = False
            if qpos[r] < qstart[r + 1]:
                p = order[qpos[r]]
                if ts[p] + t_r <= t:
                    has[0] = True
                    hp[0] = p
                    hf[0] = qflit[r]
                    any_ready = True
            for i in range(1, 5):
                has[i] = False
                k = base + i
                if bcount[k] > 0 and bt[k * depth + bhead[k]] <= t:
                    has[i] = True
                    hp[i] = bp[k * depth + bhead[k]]
                    hf[i] = bf[k * depth + bhead[k]]
                    any_ready = True
            if not any_ready:
                continue
            for i in range(5):
                used[i] = False
                if has[i]:
                    p = hp[i]
                    if dxs[p] > x:
                        routes[i] = 1
                    elif dxs[p] < x:
                        routes[i] = 2
                    elif dys[p] > y:
                        routes[i] = 3
                    elif dys[p] < y:
                        routes[i] = 4
                    else:
                        routes[i] = 0
            for o in range(5):
                if o != 0 and credits[base + o] == 0:
                    continue
                li = lock[base + o]
                if li >= 0:
                    if not has[li] or used[li]:
                        continue
                    gi = li
                else:
                    gi = -1
                    for j in range(1, 6):
                        i = (rr[base + o] + j) % 5
                        if has[i] and not used[i] and hf[i] == 0 and routes[i] == o:
                            gi = i
                            break
                    if gi < 0:
                        continue
                used[gi] = True
                p = hp[gi]
                f = hf[gi]
                if gi == 0:
                    qflit[r] += 1
                    if qflit[r] == flits:
                        qflit[r] = 0
                        qpos[r] += 1
                else:
                    k = base + gi
                    bhead[k] = (bhead[k] + 1) % depth
                    bcount[k] -= 1
                    in_net -= 1
                    up = r + step[gi]
                    pt[(phead + pcount) % pcap] = t + t_l
                    pi[(phead + pcount) % pcap] = up * 5 + OPP[gi]
                    pcount += 1
                if o == 0:
                    if f == last:
                        c = t + t_l
                        lat[p] = c - ts[p]
                        if c > makespan:
                            makespan = c
                        done += 1
                else:
                    credits[base + o] -= 1
                    n = r + step[o]
                    k = n * 5 + OPP[o]
                    j = (bhead[k] + bcount[k]) % depth
                    bp[k * depth + j] = p
                    bf[k * depth + j] = f
                    bt[k * depth + j] = t + t_l + t_r
                    bcount[k] += 1
                    in_net += 1
                if f == 0:
                    rr[base + o] = gi
                    if last > 0:
                        lock[base + o] = gi
                if f == last:
                    lock[base + o] = -1
                hops += 1
                progress = True
        if progress:
            last_progress = t
        elif t - last_progress > watchdog:
            status = t + 1
            break
        t += 1

    hops_out[0] = hops
    makespan_out[0] = makespan
    free(qstart); free(qpos); free(order); free(qflit)
    free(bp); free(bf); free(bt); free(bhead); free(bcount)
    free(credits); free(lock); free(rr); free(pt); free(pi); free(dxs); free(dys)
    return status


def run(src, dst, ts, int cols, int rows, int depth, int t_r, int t_l, int flits, long long watchdog):
    """Simulate a timestamp-sorted trace; returns ``(latencies, makespan, flit_hops)``."""
    cdef const cnp.int64_t[::1] s = np.ascontiguousarray(src, dtype=np.int64)
    cdef const cnp.int64_t[::1] d = np.ascontiguousarray(dst, dtype=np.int64)
    cdef const cnp.int64_t[::1] k = np.ascontiguousarray(ts, dtype=np.int64)
    lat_arr = np.zeros(s.shape[0], dtype=np.int64)
    cdef cnp.int64_t[::1] lat = lat_arr
    cdef long long hops = 0, makespan = 0, status
    if s.shape[0] == 0:
        return lat_arr, 0, 0
    with nogil:
        status = _sim(s, d, k, lat, cols, rows, depth, t_r, t_l, flits, watchdog, &hops, &makespan)
    if status:
        raise DeadlockDetected(f"no flit moved for {watchdog} cycles", cycle=int(status - 1))
    return lat_arr, makespan, hops
