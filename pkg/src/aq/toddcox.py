"""Todd-Coxeter coset enumeration for finite group quotients of free
groups: the closure engine behind realize_presentation for group theories.
"""

from __future__ import annotations


class BoundExceeded(Exception):
    pass


def coset_enumeration(ngens, relators, bound):
    """Enumerate cosets of the trivial subgroup in <x_0..x_{n-1} | relators>.

    relators: words as sequences of (gen_index, exponent +-1).
    Returns (table, reps): table[c][letter] with letters 0..2n-1
    (letter 2i = x_i, 2i+1 = x_i^-1), reps[c] a word reaching coset c.
    Raises BoundExceeded if more than `bound` live cosets appear.
    """
    nletters = 2 * ngens
    table = [[None] * nletters]
    reps = [[]]
    parent = [0]

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    def letter(gen, exp):
        return 2 * gen if exp > 0 else 2 * gen + 1

    def inverse_letter(lt):
        return lt ^ 1

    coincidences = []

    def set_entry(c, lt, d):
        c, d = find(c), find(d)
        cur = table[c][lt]
        if cur is not None and find(cur) != d:
            coincidences.append((find(cur), d))
            return
        table[c][lt] = d
        back = table[d][inverse_letter(lt)]
        if back is not None and find(back) != c:
            coincidences.append((find(back), c))
        table[d][inverse_letter(lt)] = c

    def merge_all():
        while coincidences:
            a, b = coincidences.pop()
            a, b = find(a), find(b)
            if a == b:
                continue
            if b < a:
                a, b = b, a
            parent[b] = a
            for lt in range(nletters):
                d = table[b][lt]
                if d is not None:
                    set_entry(a, lt, find(d))
                table[b][lt] = None

    def define(c, lt):
        live = sum(1 for i in range(len(table)) if find(i) == i)
        if live > bound or len(table) > 200 * (bound + 1):
            raise BoundExceeded()
        table.append([None] * nletters)
        parent.append(len(table) - 1)
        gen, exp = lt // 2, 1 if lt % 2 == 0 else -1
        reps.append(reps[c] + [(gen, exp)])
        set_entry(c, lt, len(table) - 1)
        merge_all()
        return find(len(table) - 1)

    def scan(c, word):
        # walk the relator from coset c, defining cosets, closing the loop
        cur = find(c)
        path = [cur]
        for gen, exp in word:
            lt = letter(gen, exp)
            nxt = table[cur][lt]
            if nxt is None:
                cur = define(cur, lt)
                cur = find(cur)
            else:
                cur = find(nxt)
            path.append(cur)
        if cur != find(c):
            coincidences.append((cur, find(c)))
            merge_all()

    changed = True
    while changed:
        changed = False
        live_before = {find(c) for c in range(len(table))}
        for c in range(len(table)):
            if find(c) != c:
                continue
            for rel in relators:
                scan(c, rel)
            for lt in range(nletters):
                if table[find(c)][lt] is None and find(c) == c:
                    define(c, lt)
        live_after = {find(c) for c in range(len(table))}
        incomplete = any(
            table[c][lt] is None
            for c in live_after
            for lt in range(nletters)
            if find(c) == c
        )
        if live_before != live_after or incomplete:
            changed = True
        if len(live_after) > bound:
            raise BoundExceeded()

    live = sorted({find(c) for c in range(len(table))})
    index = {c: i for i, c in enumerate(live)}
    out = [[index[find(table[c][lt])] for lt in range(nletters)] for c in live]
    out_reps = [reps[c] for c in live]
    return out, out_reps


def multiplication_table(table, reps):
    """Coset multiplication c * d: follow d's representative word from c."""
    n = len(table)

    def apply_word(c, word):
        for gen, exp in word:
            lt = 2 * gen if exp > 0 else 2 * gen + 1
            c = table[c][lt]
        return c

    return [[apply_word(c, reps[d]) for d in range(n)] for c in range(n)]
