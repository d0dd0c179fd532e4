"""Slow, obviously-correct reference implementations used as test oracles."""

from joinguard.tabular import MISSING


def pairwise_groups(rows):
    """Multiplicity of each row by O(n^2) comparison, no hashing."""
    n = len(rows)
    counts = [sum(1 for j in range(n) if rows[i] == rows[j]) for i in range(n)]
    first = [i for i in range(n) if all(rows[j] != rows[i] for j in range(i))]
    distinct = len(first)
    singletons = sum(1 for c in counts if c == 1)
    histogram = {}
    for i in first:
        histogram[counts[i]] = histogram.get(counts[i], 0) + 1
    return {
        "distinct": distinct,
        "singletons": singletons,
        "min_group": min(counts),
        "histogram": histogram,
    }


def nested_loop_join(a, b, keys, kind):
    """Reference join returning rows as tuples in the library's output schema."""
    apos = [a.column_index(l) for l, _ in keys]
    bpos = [b.column_index(r) for _, r in keys]
    a_rest = [i for i in range(len(a.columns)) if i not in apos]
    b_rest = [i for i in range(len(b.columns)) if i not in bpos]
    out = []
    matched_b = set()
    for ra in a.rows:
        ka = tuple(ra[i] for i in apos)
        hit = False
        for j, rb in enumerate(b.rows):
            kb = tuple(rb[i] for i in bpos)
            if MISSING in ka or MISSING in kb or ka != kb:
                continue
            hit = True
            matched_b.add(j)
            out.append(ka + tuple(ra[i] for i in a_rest) + tuple(rb[i] for i in b_rest))
        if not hit and kind == "left":
            out.append(ka + tuple(ra[i] for i in a_rest) + (MISSING,) * len(b_rest))
    if kind == "right":
        for j, rb in enumerate(b.rows):
            if j not in matched_b:
                kb = tuple(rb[i] for i in bpos)
                out.append(kb + (MISSING,) * len(a_rest) + tuple(rb[i] for i in b_rest))
    return out
