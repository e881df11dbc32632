from __future__ import annotations

from .model import BindingSet


def merge_join(left: BindingSet, right: BindingSet) -> BindingSet:
    """Natural join by sort-merge on the shared variables.

    Both inputs are in memory, so sorting them costs no block reads.
    """
    shared = [v for v in left.variables if v in right.variables]
    out_vars = tuple(sorted(set(left.variables) | set(right.variables)))
    li = [left.variables.index(v) for v in shared]
    ri = [right.variables.index(v) for v in shared]

    def emit(lrow, rrow):
        vals = dict(zip(left.variables, lrow))
        vals.update(zip(right.variables, rrow))
        return tuple(vals[v] for v in out_vars)

    if not shared:
        return BindingSet(out_vars, (emit(a, b) for a in left.rows for b in right.rows))

    lsorted = sorted(left.rows, key=lambda r: tuple(r[i] for i in li))
    rsorted = sorted(right.rows, key=lambda r: tuple(r[i] for i in ri))
    out = []
    i = j = 0
    while i < len(lsorted) and j < len(rsorted):
        lk = tuple(lsorted[i][x] for x in li)
        rk = tuple(rsorted[j][x] for x in ri)
        if lk < rk:
            i += 1
        elif lk > rk:
            j += 1
        else:
            i2 = i
            while i2 < len(lsorted) and tuple(lsorted[i2][x] for x in li) == lk:
                i2 += 1
            j2 = j
            while j2 < len(rsorted) and tuple(rsorted[j2][x] for x in ri) == rk:
                j2 += 1
            for a in lsorted[i:i2]:
                for b in rsorted[j:j2]:
                    out.append(emit(a, b))
            i, j = i2, j2
    return BindingSet(out_vars, out)
