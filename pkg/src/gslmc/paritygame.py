"""Finite two-player parity games and solvers.

Min-parity convention: a play is won by Verifier (player 0) iff the least
priority occurring infinitely often is even.  Dead ends are resolved at
construction time: a vertex with no successor loses for its owner, realized
as a self-loop whose priority has the owner's losing parity.

The attractor computation is the hot inner loop of the recursive solver.  It
runs over CSR arrays, either through a numba-compiled kernel or through a
vectorized numpy fallback; set GSLMC_DISABLE_NUMBA=1 to force the fallback.
"""

import os

import numpy as np

from gslmc.errors import ResourceBudgetError

VERIFIER = 0
REFUTER = 1

_USE_NUMBA = os.environ.get("GSLMC_DISABLE_NUMBA", "") not in ("1", "true", "yes")

if _USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        _USE_NUMBA = False

if _USE_NUMBA:

    @njit(cache=True)
    def _attract_kernel(owner, sub, seed, pred_ptr, pred_dat, succ_ptr, succ_dat, player):
        n = owner.shape[0]
        in_attr = np.zeros(n, dtype=np.bool_)
        level = np.full(n, -1, dtype=np.int64)
        # out-degree within sub, counted down for opponent vertices
        cnt = np.zeros(n, dtype=np.int64)
        for v in range(n):
            if sub[v]:
                c = 0
                for k in range(succ_ptr[v], succ_ptr[v + 1]):
                    if sub[succ_dat[k]]:
                        c += 1
                cnt[v] = c
        queue = np.empty(n, dtype=np.int64)
        head = 0
        tail = 0
        strat = np.full(n, -1, dtype=np.int64)
        for v in range(n):
            if sub[v] and seed[v]:
                in_attr[v] = True
                level[v] = 0
                queue[tail] = v
                tail += 1
        while head < tail:
            w = queue[head]
            head += 1
            for k in range(pred_ptr[w], pred_ptr[w + 1]):
                v = pred_dat[k]
                if not sub[v] or in_attr[v]:
                    continue
                if owner[v] == player:
                    in_attr[v] = True
                    level[v] = level[w] + 1
                    strat[v] = w
                    queue[tail] = v
                    tail += 1
                else:
                    cnt[v] -= 1
                    if cnt[v] == 0:
                        in_attr[v] = True
                        level[v] = level[w] + 1
                        queue[tail] = v
                        tail += 1
        return in_attr, strat

else:

    def _attract_kernel(owner, sub, seed, pred_ptr, pred_dat, succ_ptr, succ_dat, player):
        n = owner.shape[0]
        in_attr = sub & seed
        # successors-in-attractor counts, recomputed per round (vectorized)
        sub_idx = np.nonzero(sub)[0]
        while True:
            tgt = in_attr[succ_dat] & sub[succ_dat]
            cnt_in = np.add.reduceat(tgt, succ_ptr[:-1]) if len(succ_dat) else np.zeros(n, dtype=np.int64)
            cnt_in = np.asarray(cnt_in, dtype=np.int64)
            cnt_in[succ_ptr[:-1] == succ_ptr[1:]] = 0
            sub_succ = sub[succ_dat]
            deg = np.add.reduceat(sub_succ, succ_ptr[:-1]) if len(succ_dat) else np.zeros(n, dtype=np.int64)
            deg = np.asarray(deg, dtype=np.int64)
            deg[succ_ptr[:-1] == succ_ptr[1:]] = 0
            can = (owner == player) & (cnt_in > 0)
            must = (owner != player) & (deg > 0) & (cnt_in == deg)
            new = sub & (can | must) & ~in_attr
            if not new.any():
                break
            in_attr = in_attr | new
        # strategy: any successor strictly closer to the seed
        dist = np.full(n, -1, dtype=np.int64)
        dist[in_attr & seed] = 0
        frontier = list(np.nonzero(in_attr & seed)[0])
        d = 0
        remaining = set(np.nonzero(in_attr & ~seed)[0].tolist())
        while frontier:
            d += 1
            nxt = []
            for v in list(remaining):
                for k in range(succ_ptr[v], succ_ptr[v + 1]):
                    w = succ_dat[k]
                    if in_attr[w] and dist[w] == d - 1:
                        dist[v] = d
                        nxt.append(v)
                        break
            for v in nxt:
                remaining.discard(v)
            frontier = nxt
        strat = np.full(n, -1, dtype=np.int64)
        for v in np.nonzero(in_attr & (owner == player) & ~seed)[0]:
            best = -1
            for k in range(succ_ptr[v], succ_ptr[v + 1]):
                w = succ_dat[k]
                if in_attr[w] and 0 <= dist[w] < dist[v]:
                    best = w
                    break
            strat[v] = best
        del sub_idx
        return in_attr, strat


class ParityGame:
    """Vertices carry an owner, a priority, and a successor list."""

    def __init__(self, owners, priorities, successors):
        n = len(owners)
        if len(priorities) != n or len(successors) != n:
            raise ValueError("owner/priority/successor lists must align")
        owners = list(owners)
        priorities = list(priorities)
        successors = [list(s) for s in successors]
        for v in range(n):
            if not successors[v]:
                # dead end: loses for its owner
                successors[v] = [v]
                priorities[v] = 1 if owners[v] == VERIFIER else 0
        self.n = n
        self.owner = np.asarray(owners, dtype=np.int8)
        self.priority = np.asarray(priorities, dtype=np.int64)
        ptr = [0]
        dat = []
        for v in range(n):
            dat.extend(successors[v])
            ptr.append(len(dat))
        self.succ_ptr = np.asarray(ptr, dtype=np.int64)
        self.succ_dat = np.asarray(dat, dtype=np.int64)
        pred = [[] for _ in range(n)]
        for v in range(n):
            for w in successors[v]:
                pred[w].append(v)
        pptr = [0]
        pdat = []
        for v in range(n):
            pdat.extend(pred[v])
            pptr.append(len(pdat))
        self.pred_ptr = np.asarray(pptr, dtype=np.int64)
        self.pred_dat = np.asarray(pdat, dtype=np.int64)

    def successors_of(self, v):
        return self.succ_dat[self.succ_ptr[v] : self.succ_ptr[v + 1]].tolist()

    def attractor(self, player, seed_mask, sub_mask):
        """Attractor of seed within sub for player, plus a level-decreasing
        positional strategy on the attracted non-seed vertices."""
        in_attr, strat = _attract_kernel(
            self.owner,
            np.asarray(sub_mask, dtype=bool),
            np.asarray(seed_mask, dtype=bool),
            self.pred_ptr,
            self.pred_dat,
            self.succ_ptr,
            self.succ_dat,
            player,
        )
        return in_attr, strat

    def dump(self):
        """One vertex per line: id, owner, priority, successor list."""
        lines = []
        for v in range(self.n):
            succ = " ".join(str(w) for w in self.successors_of(v))
            lines.append(f"{v} {int(self.owner[v])} {int(self.priority[v])} {succ}")
        return "\n".join(lines) + "\n"


def solve_zielonka(game):
    """Winning regions and positional winning strategies for both players.

    Returns (win, strategy): win[v] in {0,1} is the winner at v; strategy[v]
    is the successor the winner's strategy picks at vertices the winner owns
    inside their region (-1 where the owner is the loser there).
    """
    n = game.n
    win = np.full(n, -1, dtype=np.int8)
    strat = np.full(n, -1, dtype=np.int64)

    def rec(sub):
        if not sub.any():
            return
        pmin = int(game.priority[sub].min())
        player = pmin % 2
        opp = 1 - player
        seed = sub & (game.priority == pmin)
        attr, attr_strat = game.attractor(player, seed, sub)
        rest = sub & ~attr
        rec(rest)
        opp_rest = rest & (win == opp)
        if not opp_rest.any():
            # player wins everything in sub
            win[sub] = player
            for v in np.nonzero(attr & (game.owner == player))[0]:
                if attr_strat[v] >= 0:
                    strat[v] = attr_strat[v]
                else:
                    # seed vertex: any successor staying in sub will do
                    for w in game.successors_of(v):
                        if sub[w]:
                            strat[v] = w
                            break
            return
        opp_attr, opp_strat = game.attractor(opp, opp_rest, sub)
        # opponent keeps the strategy computed in the subgame, extended by
        # the attractor strategy toward it
        for v in np.nonzero(opp_attr & (game.owner == opp) & ~opp_rest)[0]:
            if opp_strat[v] >= 0:
                strat[v] = opp_strat[v]
        win[opp_attr] = opp
        remaining = sub & ~opp_attr
        # recompute the rest from scratch
        win[remaining] = -1
        strat[remaining] = -1
        rec(remaining)

    rec(np.ones(n, dtype=bool))
    return win, strat


def solve_fixpoint(game, budget=4096):
    """Winning regions by direct nested-fixpoint evaluation (oracle solver).

    Independent of the recursive solver: evaluates the parity fixpoint
    expression over the controlled-predecessor operator, outermost variable
    at the most significant (smallest) priority.
    """
    n = game.n
    if n > budget:
        raise ResourceBudgetError(f"fixpoint oracle limited to {budget} vertices")
    prios = sorted(set(int(p) for p in game.priority))

    def cpre(target):
        out = np.zeros(n, dtype=bool)
        for v in range(n):
            succ = game.successors_of(v)
            if game.owner[v] == VERIFIER:
                out[v] = any(target[w] for w in succ)
            else:
                out[v] = all(target[w] for w in succ)
        return out

    def phi(env):
        out = np.zeros(n, dtype=bool)
        for p in prios:
            mask = game.priority == p
            out[mask] = cpre(env[p])[mask]
        return out

    def nested(i, env):
        if i == len(prios):
            return phi(env)
        p = prios[i]
        cur = np.full(n, p % 2 == 0, dtype=bool)  # nu starts full, mu empty
        while True:
            env2 = dict(env)
            env2[p] = cur
            val = nested(i + 1, env2)
            if (val == cur).all():
                return val
            cur = val

    wv = nested(0, {})
    win = np.where(wv, VERIFIER, REFUTER).astype(np.int8)
    return win


def verify_strategy(game, region_mask, player, strategy):
    """Check that a positional strategy is winning for player on the region.

    Every play that starts in the region, follows strategy at the player's
    vertices, and follows any edge at opponent vertices, must stay in the
    region and satisfy the player's parity objective (cycle analysis).
    """
    region = np.asarray(region_mask, dtype=bool)
    if not region.any():
        return True
    edges = {}
    for v in np.nonzero(region)[0]:
        v = int(v)
        if game.owner[v] == player:
            w = int(strategy[v])
            if w < 0 or w not in game.successors_of(v):
                return False
            if not region[w]:
                return False
            edges[v] = [w]
        else:
            succ = game.successors_of(v)
            if any(not region[w] for w in succ):
                return False
            edges[v] = succ
    # every cycle of the restricted graph must have min priority of the
    # player's parity; check the negation: for each bad priority p, no cycle
    # through a p-vertex using only priorities >= p
    for p in sorted(set(int(game.priority[v]) for v in edges)):
        if p % 2 == player:
            continue
        vset = {v for v in edges if game.priority[v] >= p}
        sub_edges = {v: [w for w in edges[v] if w in vset] for v in vset}
        for comp in _sccs(sorted(vset), sub_edges):
            has_cycle = len(comp) > 1 or comp[0] in sub_edges[comp[0]]
            if has_cycle and any(game.priority[v] == p for v in comp):
                return False
    return True


def _sccs(verts, edges):
    """Tarjan's strongly connected components, iterative."""
    index = {}
    low = {}
    onstack = set()
    stack = []
    out = []
    counter = [0]
    for root in verts:
        if root in index:
            continue
        work = [(root, iter(edges.get(root, [])))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        onstack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    onstack.add(w)
                    work.append((w, iter(edges.get(w, []))))
                    advanced = True
                    break
                elif w in onstack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out
