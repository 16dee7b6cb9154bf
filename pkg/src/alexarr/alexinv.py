"""Presentations of Alexander invariants.

A ``Presentation`` is a matrix whose rows are relations and whose columns
are generators; the presented module is its cokernel (row vectors modulo
the row space).  Generators of the arrangement presentations are the wedge
basis e_{i,j} of C_2.
"""

from __future__ import annotations

from dataclasses import dataclass

from .braidrep import (ConjTuple, ConjugatedTwist, exterior_power, gassner_twist,
                       gassner_word, mu_matrix)
from .exactring import (LaurentPoly, Poly, RingMatrix, laurent_to_series, parse_poly,
                        truncated_inverse, unit_pivot_inverse)
from .freefox import abelianized_gradient
from .koszul import (basis_index, differential, label, nabla_V, scale_vec,
                     vec_to_row, wedge, wedge_basis)


@dataclass(frozen=True)
class Presentation:
    """coker(matrix): rows are relations, columns generators.

    ``ring`` is ``"Lambda"`` (Laurent polynomials in n variables), ``"R"``
    (polynomials in x_1..x_n) or ``"P<D>"`` (power series modulo degree D+1).
    ``expected`` optionally records Chen ranks as ((k, theta_k), ...) so a
    saved presentation can be checked against what it was saved with.
    """

    matrix: RingMatrix
    ring: str = "Lambda"
    expected: tuple = ()

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def num_generators(self) -> int:
        return self.matrix.shape[1]

    @property
    def num_relations(self) -> int:
        return self.matrix.shape[0]

    @property
    def generator_labels(self) -> list:
        return self.matrix.col_labels

    @property
    def relation_labels(self) -> list:
        return self.matrix.row_labels

    @property
    def truncation(self) -> int | None:
        return int(self.ring[1:]) if self.ring.startswith("P") else None

    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    # -- text format ---------------------------------------------------
    def dumps(self) -> str:
        """Plain-text serialization; ``loads`` inverts it exactly."""
        lines = ["presentation", f"ring {self.ring}", f"variables {self.n}",
                 "generators " + " ; ".join(str(g) for g in self.generator_labels)]
        for lab, row in zip(self.relation_labels, self.matrix.entries):
            lines.append(f"relation {lab} :: " + " ; ".join(str(x) for x in row))
        if self.expected:
            lines.append("expect " + " ".join(f"{k}={v}" for k, v in self.expected))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Presentation":
        ring, n, gens, rows, rlabels, expected = "Lambda", None, None, [], [], []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#") or line == "presentation":
                continue
            try:
                key, _, rest = line.partition(" ")
                if key == "ring":
                    ring = rest.strip()
                elif key == "variables":
                    n = int(rest)
                elif key == "generators":
                    gens = [g.strip() for g in rest.split(";")] if rest.strip() else []
                elif key == "relation":
                    lab, _, body = rest.partition("::")
                    if n is None or gens is None:
                        raise ValueError("relation before variables/generators header")
                    entries = [x for x in body.split(";")] if gens else []
                    if len(entries) != len(gens):
                        raise ValueError(f"expected {len(gens)} entries, found {len(entries)}")
                    kind = LaurentPoly if ring == "Lambda" else Poly
                    rows.append([parse_poly(x, n, kind) for x in entries])
                    rlabels.append(lab.strip())
                elif key == "expect":
                    for item in rest.split():
                        k, _, v = item.partition("=")
                        expected.append((int(k), int(v)))
                else:
                    raise ValueError(f"unknown keyword {key!r}")
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        if n is None or gens is None:
            raise ValueError("missing 'variables' or 'generators' header")
        kind = LaurentPoly if ring == "Lambda" else Poly
        if ring.startswith("P"):
            D = int(ring[1:])
            rows = [[Poly(n, x.terms, D) for x in r] for r in rows]
        return cls(RingMatrix(rows, n, rlabels, gens, kind), ring, tuple(expected))


def _wedge_labels(n: int, k: int) -> list[str]:
    return [label(J) for J in wedge_basis(n, k)]


def _d3(n: int) -> RingMatrix:
    """d_3, or an empty relation block when n < 3."""
    if n >= 3:
        m = differential(n, 3)
        return RingMatrix(m.entries, n, [f"d3 {lab}" for lab in m.row_labels], m.col_labels)
    return RingMatrix([], n, [], _wedge_labels(n, 2))


def free_group_presentation(n: int) -> Presentation:
    """B(F_n) = coker d_3."""
    return Presentation(_d3(n))


# -- Phi maps --------------------------------------------------------------------

def phi_V_vector(V, i: int, n: int) -> dict:
    """Phi_V(e_i) as a sparse C_2 vector."""
    V = sorted(V)
    if len(V) < 2:
        raise ValueError(f"|V| >= 2 required, got {V}")
    ei = {(i,): LaurentPoly.one(n)}
    if i in V:
        return wedge(nabla_V(V, n), ei)
    if V[0] < i < V[-1]:
        above = [v for v in V if v > i]
        return scale_vec(wedge(nabla_V(V, n), nabla_V(above, n)), 1 - LaurentPoly.var(n, i))
    return {}


def phi_V(V, n: int, full: bool = False) -> RingMatrix:
    """Matrix of Phi_V restricted to C_1(V'), or on all of C_1 when ``full``."""
    V = sorted(V)
    if len(V) < 2:
        raise ValueError(f"|V| >= 2 required, got {V}")
    rows_idx = range(1, n + 1) if full else V[1:]
    rows = [vec_to_row(phi_V_vector(V, i, n), n, 2) for i in rows_idx]
    return RingMatrix(rows, n, [label((i,)) for i in rows_idx], _wedge_labels(n, 2))


def phi_conj(z: ConjTuple) -> RingMatrix:
    """Phi(gamma_z): e_i -> grad^ab(z_i) ^ e_i, with d_2 Phi = id - Theta(gamma_z)."""
    n = z.n
    rows = []
    for i, zi in enumerate(z.words, start=1):
        g = {(j,): c for j, c in enumerate(abelianized_gradient(zi), start=1) if c}
        rows.append(vec_to_row(wedge(g, {(i,): LaurentPoly.one(n)}), n, 2))
    return RingMatrix(rows, n, [label((i,)) for i in range(1, n + 1)], _wedge_labels(n, 2))


# -- arrangement presentations ------------------------------------------------------

def alexander_matrix(monodromy, n: int) -> Presentation:
    """Stacked id - Theta(alpha_k): a presentation of the Alexander module."""
    ident = RingMatrix.identity(n, n, labels=[label((i,)) for i in range(1, n + 1)])
    m = RingMatrix([], n, [], ident.col_labels)
    for k, tw in enumerate(monodromy, start=1):
        block = ident - gassner_twist(tw)
        block = RingMatrix(block.entries, n, [f"a{k} {lab}" for lab in block.row_labels], block.col_labels)
        m = m.stack(block)
    return Presentation(m)


def _conj_rows(tw: ConjugatedTwist, n: int, labels_prefix: str) -> RingMatrix:
    rows = phi_V(tw.V, n)
    if not tw.delta.is_identity():
        rows = rows @ exterior_power(gassner_word(tw.delta), 2)
    return RingMatrix(rows.entries, n, [f"{labels_prefix} {lab}" for lab in rows.row_labels],
                      _wedge_labels(n, 2))


def presentation_general(monodromy, n: int) -> Presentation:
    """(Phi; d_3): Phi on C_1(V'_k) is Phi_{V_k} followed by Theta_2(delta_k)."""
    m = RingMatrix([], n, [], _wedge_labels(n, 2))
    for k, tw in enumerate(monodromy, start=1):
        if tw.n != n:
            raise ValueError(f"generator {tw} has {tw.n} strands, expected {n}")
        m = m.stack(_conj_rows(tw, n, f"phi{k}"))
    return Presentation(m.stack(_d3(n)))


def _pair_owner(vertex_sets, n: int, require_partition: bool) -> dict:
    owner = {}
    for k, V in enumerate(vertex_sets):
        V = sorted(V)
        for a in range(len(V)):
            for b in range(a + 1, len(V)):
                p = (V[a], V[b])
                if p in owner:
                    raise ValueError(f"not an arrangement lattice: pair {p} covered twice")
                owner[p] = k
    if require_partition:
        missing = [p for p in wedge_basis(n, 2) if p not in owner]
        if missing:
            raise ValueError(f"not an arrangement lattice: pair {missing[0]} never covered")
    return owner


def _block_map(blocks, n: int) -> RingMatrix:
    """Endomorphism of C_2 acting by ``blocks[k]`` on rows e_J, J inside V_k, identity elsewhere."""
    ident = RingMatrix.identity(len(wedge_basis(n, 2)), n, labels=_wedge_labels(n, 2))
    rows = [list(r) for r in ident.entries]
    idx = basis_index(n, 2)
    for V, theta2 in blocks:
        V = sorted(V)
        for a in range(len(V)):
            for b in range(a + 1, len(V)):
                r = idx[(V[a], V[b])]
                rows[r] = list(theta2.entries[r])
    return RingMatrix(rows, n, ident.row_labels, ident.col_labels)


def complement_generators(vertex_sets, n: int) -> list[tuple]:
    """The pairs spanning L_0: all pairs except {min V, i} for i in V'."""
    removed = set()
    for V in vertex_sets:
        V = sorted(V)
        removed.update((V[0], i) for i in V[1:])
    return [J for J in wedge_basis(n, 2) if J not in removed]


def presentation_real(wiring, n: int) -> Presentation:
    """Reduced presentation for a real arrangement from its wiring data.

    ``wiring`` is a sequence of (V_k, J_k) or of objects with ``V`` and
    ``delta`` attributes.  Every pair may be covered at most once; pairs that
    are never covered (parallel lines of an affine arrangement) simply stay
    among the generators.
    """
    twists = [_as_twist(w, n) for w in wiring]
    _pair_owner([t.V for t in twists], n, require_partition=False)
    mu_blocks = [(t.V, exterior_power(mu_matrix(t.V, n)[0], 2)) for t in twists]
    delta_blocks = [(t.V, exterior_power(gassner_word(t.delta), 2)) for t in twists if not t.delta.is_identity()]
    inv_delta = unit_pivot_inverse(_block_map(delta_blocks, n))
    inv_mu = unit_pivot_inverse(_block_map(mu_blocks, n))
    keep = complement_generators([t.V for t in twists], n)
    idx = basis_index(n, 2)
    change = inv_delta @ inv_mu
    m = _d3(n) @ change if n >= 3 else RingMatrix([], n, [], change.col_labels)
    m = m.select(cols=[idx[J] for J in keep]) if m.shape[0] else RingMatrix([], n, [], [label(J) for J in keep])
    return Presentation(m)


def _as_twist(w, n: int) -> ConjugatedTwist:
    if isinstance(w, ConjugatedTwist):
        return w
    V, J = w
    from .geomingest import delta_from_above
    return ConjugatedTwist(tuple(sorted(V)), delta_from_above(V, J, n))


def presentation_pure_link(tuples) -> Presentation:
    """(Phi(gamma_{z^1}); ...; Phi(gamma_{z^s}); d_3) for basis-conjugating z^k."""
    tuples = list(tuples)
    if not tuples:
        raise ValueError("at least one conjugating tuple is required")
    n = tuples[0].n
    m = RingMatrix([], n, [], _wedge_labels(n, 2))
    for k, z in enumerate(tuples, start=1):
        block = phi_conj(z)
        m = m.stack(RingMatrix(block.entries, n, [f"phi{k} {lab}" for lab in block.row_labels], block.col_labels))
    return Presentation(m.stack(_d3(n)))


# -- products and cones --------------------------------------------------------------

def _d_column(n: int, offset: int, total: int) -> list[LaurentPoly]:
    return [LaurentPoly.var(total, offset + j) - 1 for j in range(1, n + 1)]


def presentation_product(p1: Presentation, p2: Presentation) -> Presentation:
    """Presentation of B(G1 x G2) over Lambda_1 (x) Lambda_2.

    Variables of ``p1`` come first.  Block form
    ((Delta_1; D_2^{b_1}) , 0) over (0, (Delta_2; D_1^{b_2})).
    """
    if p1.ring != "Lambda" or p2.ring != "Lambda":
        raise ValueError("products are formed over Laurent polynomial rings")
    n1, n2 = p1.n, p2.n
    n = n1 + n2
    b1, b2 = p1.num_generators, p2.num_generators
    zero = LaurentPoly.zero(n)
    rows, labels = [], []
    for lab, r in zip(p1.relation_labels, p1.matrix.entries):
        rows.append([x.extend(n, 0) for x in r] + [zero] * b2)
        labels.append(f"L {lab}")
    D2 = _d_column(n2, n1, n)
    for g in range(b1):
        for j, c in enumerate(D2, start=1):
            row = [zero] * (b1 + b2)
            row[g] = c
            rows.append(row)
            labels.append(f"L D{j}*{p1.generator_labels[g]}")
    for lab, r in zip(p2.relation_labels, p2.matrix.entries):
        rows.append([zero] * b1 + [x.extend(n, n1) for x in r])
        labels.append(f"R {lab}")
    D1 = _d_column(n1, 0, n)
    for g in range(b2):
        for j, c in enumerate(D1, start=1):
            row = [zero] * (b1 + b2)
            row[b1 + g] = c
            rows.append(row)
            labels.append(f"R D{j}*{p2.generator_labels[g]}")
    cols = [f"L {g}" for g in p1.generator_labels] + [f"R {g}" for g in p2.generator_labels]
    return Presentation(RingMatrix(rows, n, labels, cols))


def presentation_cone(p: Presentation) -> Presentation:
    """Adjoin a variable x = t_{n+1} and the relations (x - 1) * id."""
    if p.ring != "Lambda":
        raise ValueError("cones are formed over Laurent polynomial rings")
    n = p.n + 1
    b = p.num_generators
    zero = LaurentPoly.zero(n)
    x1 = LaurentPoly.var(n, n) - 1
    rows = [[x.extend(n, 0) for x in r] for r in p.matrix.entries]
    labels = list(p.relation_labels)
    for g in range(b):
        row = [zero] * b
        row[g] = x1
        rows.append(row)
        labels.append(f"cone {p.generator_labels[g]}")
    return Presentation(RingMatrix(rows, n, labels, p.generator_labels))


# -- reduced completed presentation ----------------------------------------------------

def presentation_completed_reduced(monodromy, n: int, D: int) -> Presentation:
    """Presentation of the completion, correct modulo m^(D+1), on L_0 generators.

    The Phi-rows are used to eliminate the summand K'_0 spanned by
    e_{min V} ^ e_i (i in V'); the remaining relations are the images of the
    rows of d_3.
    """
    if D < 1:
        raise ValueError("truncation degree must be at least 1")
    twists = list(monodromy)
    _pair_owner([t.V for t in twists], n, require_partition=True)
    gen = presentation_general(twists, n)
    b2 = sum(len(t.V) - 1 for t in twists)
    phi = gen.matrix.select(rows=list(range(b2)))
    d3 = gen.matrix.select(rows=list(range(b2, gen.num_relations)))
    to_series = lambda x: laurent_to_series(x, D)  # noqa: E731
    phi_hat = phi.map(to_series, kind=Poly)
    d3_hat = d3.map(to_series, kind=Poly)
    idx = basis_index(n, 2)
    kprime = []
    for t in twists:
        kprime.extend((t.V[0], i) for i in t.V[1:])
    keep = complement_generators([t.V for t in twists], n)
    phi_prime = phi_hat.select(cols=[idx[J] for J in kprime])
    phi_prime_inv = truncated_inverse(phi_prime, D)
    # v -> v (I - P' Phi'^-1 Phi) P''
    correction = phi_prime_inv @ phi_hat.select(cols=[idx[J] for J in keep])
    if d3_hat.shape[0] == 0:
        return Presentation(RingMatrix([], n, [], [label(J) for J in keep], Poly), f"P{D}")
    m = d3_hat.select(cols=[idx[J] for J in keep]) - d3_hat.select(cols=[idx[J] for J in kprime]) @ correction
    m = m.map(lambda x: x.truncate(D), kind=Poly)
    return Presentation(RingMatrix(m.entries, n, d3.row_labels, [label(J) for J in keep], Poly), f"P{D}")
