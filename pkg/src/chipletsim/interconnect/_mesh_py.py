"""Pure-Python mesh kernel; the reference the compiled core must match.

Router model: five ports (0 local, 1 east, 2 west, 3 north, 4 south), one
virtual channel per input, X-then-Y routing, wormhole switching with
credit-based flow control and per-output round-robin arbitration.

Timing: a flit granted at cycle ``t`` on a network output lands in the
downstream input buffer and becomes eligible at ``t + t_l + t_r``; the
credit for a popped flit reaches the upstream router at ``t + t_l``; an
ejected flit leaves the network at ``t + t_l``. A packet injected at ``ts``
is eligible at its source router from ``ts + t_r``.
"""

from collections import deque

from ..errors import DeadlockDetected

OPP = (0, 2, 1, 4, 3)


def run(src, dst, ts, cols, rows, depth, t_r, t_l, flits, watchdog):
    """Simulate a timestamp-sorted trace.

    Returns ``(latencies, makespan, flit_hops)`` with latencies in trace order.
    """
    R = cols * rows
    P = len(src)
    lat = [0] * P
    if P == 0:
        return lat, 0, 0

    queues = [[] for _ in range(R)]
    for p in range(P):
        queues[src[p]].append(p)
    qpos = [0] * R
    qflit = [0] * R
    bufs = [deque() for _ in range(R * 5)]
    credits = [depth] * (R * 5)
    lock = [-1] * (R * 5)
    rr = [4] * (R * 5)
    pending = deque()
    dx = [d % cols for d in dst]
    dy = [d // cols for d in dst]
    last = flits - 1

    in_net = done = hops = makespan = 0
    t = last_progress = 0
    while done < P:
        if in_net == 0:
            nxt = min((ts[q[qpos[r]]] + t_r for r, q in enumerate(queues) if qpos[r] < len(q)), default=t)
            if nxt > t:
                t = nxt
                last_progress = t
        while pending and pending[0][0] <= t:
            credits[pending.popleft()[1]] += 1

        progress = False
        for r in range(R):
            base = r * 5
            x, y = r % cols, r // cols
            # ready head flit per input: (packet, flit, route)
            heads = [None] * 5
            any_ready = False
            q = queues[r]
            if qpos[r] < len(q):
                p = q[qpos[r]]
                if ts[p] + t_r <= t:
                    heads[0] = p, qflit[r]
                    any_ready = True
            for i in range(1, 5):
                b = bufs[base + i]
                if b and b[0][2] <= t:
                    heads[i] = b[0][0], b[0][1]
                    any_ready = True
            if not any_ready:
                continue
            routes = [-1] * 5
            for i in range(5):
                h = heads[i]
                if h is not None:
                    p = h[0]
                    if dx[p] > x:
                        routes[i] = 1
                    elif dx[p] < x:
                        routes[i] = 2
                    elif dy[p] > y:
                        routes[i] = 3
                    elif dy[p] < y:
                        routes[i] = 4
                    else:
                        routes[i] = 0
            used = [False] * 5
            for o in range(5):
                if o and credits[base + o] == 0:
                    continue
                li = lock[base + o]
                if li >= 0:
                    if heads[li] is None or used[li]:
                        continue
                    gi = li
                else:
                    gi = -1
                    for j in range(1, 6):
                        i = (rr[base + o] + j) % 5
                        h = heads[i]
                        if h is not None and not used[i] and h[1] == 0 and routes[i] == o:
                            gi = i
                            break
                    if gi < 0:
                        continue
                used[gi] = True
                p, f = heads[gi]
                # pop from the input
                if gi == 0:
                    qflit[r] += 1
                    if qflit[r] == flits:
                        qflit[r] = 0
                        qpos[r] += 1
                else:
                    bufs[base + gi].popleft()
                    in_net -= 1
                    up = r + (1, -1, cols, -cols)[gi - 1]
                    pending.append((t + t_l, up * 5 + OPP[gi]))
                # push downstream
                if o == 0:
                    if f == last:
                        c = t + t_l
                        lat[p] = c - ts[p]
                        if c > makespan:
                            makespan = c
                        done += 1
                else:
                    credits[base + o] -= 1
                    n = r + (1, -1, cols, -cols)[o - 1]
                    bufs[n * 5 + OPP[o]].append((p, f, t + t_l + t_r))
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
            raise DeadlockDetected(f"no flit moved for {watchdog} cycles", cycle=t)
        t += 1
    return lat, makespan, hops
