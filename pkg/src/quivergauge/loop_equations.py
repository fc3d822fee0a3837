"""Exact finite-N loop equations for Wilson loops rooted at an edge.

Left-translation invariance of the Haar measure at a rooted non-self-loop
edge turns into an exact relation: a signed sum of double-trace terms built
from the Wilson word's decomposition at the root equals a signed sum of
single-trace terms in which each action plaquette containing the root is
spliced into the Wilson word.  All traces carry a 1/N normalisation.

Conventions (fixed here, verified against Monte Carlo at finite N):

* Holonomy is the matrix product in word order.
* If the word contains the root forward, it is rotated to start there and
  the left-translation form is used; if it contains the root only backward,
  it is rotated to start at the reversed root and the mirrored
  (right-translation) form is used.  Both are exact; the choice only keeps
  every emitted term a closed word.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .action import PlaquetteTable, format_rational
from .laurent import YXPoly
from .quiver import (
    CyclicWord,
    EdgeWord,
    Quiver,
    QuiverError,
    _cyclic_reduce,
    cyclic_canonical,
    is_reduced,
)


@dataclass(frozen=True)
class RootedDecomposition:
    """A closed word split at every occurrence of the rooted edge.

    ``rotated`` is the input rotated to start at an occurrence;
    ``signs[j]`` is the orientation of the j-th occurrence and ``between[j]``
    the root-free subword following it.  ``p == 0`` when the root is absent.
    """

    root: str
    signs: tuple[int, ...]
    between: tuple[EdgeWord, ...]
    rotated: EdgeWord

    @property
    def p(self) -> int:
        return len(self.signs)


@dataclass(frozen=True)
class DoubleTraceTerm:
    coeff: int
    words: tuple[CyclicWord, CyclicWord]  # sorted pair; traces commute


@dataclass(frozen=True)
class SingleTraceTerm:
    multiplicity: int  # signed; coefficient is multiplicity * g(plaquette)
    plaquette: CyclicWord
    word: CyclicWord


@dataclass(frozen=True)
class LoopEquation:
    """lhs: double-trace terms (1/N^2 Tr Tr); rhs: plaquette-coupled single traces (1/N Tr)."""

    mode: str  # "finite" or "large"
    root: str
    loop: CyclicWord
    lhs: tuple[DoubleTraceTerm, ...]
    rhs: tuple[SingleTraceTerm, ...]

    def rhs_coefficient(self, table: PlaquetteTable, term: SingleTraceTerm) -> Fraction:
        return term.multiplicity * table.coupling(term.plaquette)

    def to_json_dict(self, table: PlaquetteTable | None = None) -> dict:
        rhs = []
        for t in self.rhs:
            entry = {
                "multiplicity": t.multiplicity,
                "plaquette": str(t.plaquette),
                "word": str(t.word),
            }
            if table is not None:
                entry["coefficient"] = format_rational(self.rhs_coefficient(table, t))
            rhs.append(entry)
        return {
            "mode": self.mode,
            "root": self.root,
            "loop": str(self.loop),
            "lhs": [
                {"coefficient": t.coeff, "words": [str(t.words[0]), str(t.words[1])]}
                for t in self.lhs
            ],
            "rhs": rhs,
        }

    def render(self, table: PlaquetteTable | None = None) -> str:
        def tr(w: CyclicWord) -> str:
            return f"tr({w})"

        left = " + ".join(
            (f"{t.coeff}*" if t.coeff != 1 else "") + f"{tr(t.words[0])}{tr(t.words[1])}"
            for t in self.lhs
        ) or "0"
        parts = []
        for t in self.rhs:
            if table is not None:
                c = self.rhs_coefficient(table, t)
                parts.append(f"({format_rational(c)})*{tr(t.word)}")
            else:
                mult = "" if t.multiplicity == 1 else f"{t.multiplicity}*"
                parts.append(f"{mult}g[{t.plaquette}]*{tr(t.word)}")
        right = " + ".join(parts) or "0"
        return f"< {left} > = < {right} >   [{self.mode}-N, root {self.root}]"


@dataclass(frozen=True)
class MomentEquation:
    """Large-N factorised relation among moments of powers of one generator.

    ``m_k`` denotes the limit of the normalised trace of the k-th power of
    the generator; ``k < 0`` means the reversed generator.
    """

    generator: CyclicWord
    lhs: tuple[tuple[int, int, int], ...]  # (coeff, i, j) -> coeff * m_i * m_j
    rhs: tuple[tuple[int, CyclicWord, int], ...]  # (multiplicity, plaquette, k)

    def render(self) -> str:
        left = " + ".join(f"{c}*m[{i}]*m[{j}]" if c != 1 else f"m[{i}]*m[{j}]" for c, i, j in self.lhs) or "0"
        right = " + ".join(f"{m}*g[{p}]*m[{k}]" if m != 1 else f"g[{p}]*m[{k}]" for m, p, k in self.rhs) or "0"
        return f"{left} = {right}"

    def residual_polynomial(
        self,
        moment_fn: Callable[[int], YXPoly],
        coupling_fn: Callable[[CyclicWord], YXPoly],
    ) -> YXPoly:
        """lhs - rhs after substituting symbolic moments and couplings."""
        acc = YXPoly.zero()
        for c, i, j in self.lhs:
            acc = acc + moment_fn(i) * moment_fn(j) * c
        for mult, plaq, k in self.rhs:
            acc = acc - coupling_fn(plaq) * moment_fn(k) * mult
        return acc


def root_decompose(q: Quiver, beta: EdgeWord, root: str) -> RootedDecomposition:
    """Split a reduced closed word at every occurrence of the rooted edge.

    The word is rotated to start at an occurrence (forward preferred); when
    the root is absent the decomposition is empty.
    """
    if q.is_self_loop(root):
        raise QuiverError(f"rooted edge {root!r} is a self-loop")
    if not is_reduced(beta):
        raise QuiverError("word must be reduced before decomposition")
    if beta.steps and not q.is_closed(beta):
        raise QuiverError(f"word {beta} is not closed")
    occ_fwd = [i for i, (e, o) in enumerate(beta.steps) if e == root and o > 0]
    occ_any = [i for i, (e, o) in enumerate(beta.steps) if e == root]
    if not occ_any:
        return RootedDecomposition(root=root, signs=(), between=(), rotated=beta)
    start = occ_fwd[0] if occ_fwd else occ_any[0]
    rotated = beta.rotate(start)
    signs: list[int] = []
    segments: list[list] = []
    for step in rotated.steps:
        if step[0] == root:
            signs.append(step[1])
            segments.append([])
        else:
            segments[-1].append(step)
    between = [EdgeWord(tuple(seg)) for seg in segments]
    return RootedDecomposition(
        root=root, signs=tuple(signs), between=tuple(between), rotated=rotated
    )


def _sorted_pair(a: CyclicWord, b: CyclicWord) -> tuple[CyclicWord, CyclicWord]:
    ka = tuple((e, o) for e, o in a.steps)
    kb = tuple((e, o) for e, o in b.steps)
    return (a, b) if (len(ka), ka) <= (len(kb), kb) else (b, a)


def _merge_lhs(terms: list[tuple[int, tuple[CyclicWord, CyclicWord]]]) -> tuple[DoubleTraceTerm, ...]:
    acc: dict[tuple[CyclicWord, CyclicWord], int] = {}
    order: list[tuple[CyclicWord, CyclicWord]] = []
    for c, pair in terms:
        if pair not in acc:
            acc[pair] = 0
            order.append(pair)
        acc[pair] += c
    return tuple(DoubleTraceTerm(coeff=acc[p], words=p) for p in order if acc[p] != 0)


def _merge_rhs(terms: list[tuple[int, CyclicWord, CyclicWord]]) -> tuple[SingleTraceTerm, ...]:
    acc: dict[tuple[CyclicWord, CyclicWord], int] = {}
    order: list[tuple[CyclicWord, CyclicWord]] = []
    for s, plaq, w in terms:
        key = (plaq, w)
        if key not in acc:
            acc[key] = 0
            order.append(key)
        acc[key] += s
    return tuple(
        SingleTraceTerm(multiplicity=acc[k], plaquette=k[0], word=k[1])
        for k in order
        if acc[k] != 0
    )


def _occurrence_rotations(gamma: CyclicWord, root: str):
    """Yield (orientation, index) for each root occurrence in the cyclic word."""
    for i, (e, o) in enumerate(gamma.steps):
        if e == root:
            yield o, i


def generate_loop_equation(
    q: Quiver,
    table: PlaquetteTable,
    beta: EdgeWord,
    root: str,
    mode: str = "finite",
) -> LoopEquation:
    """Emit the exact loop equation for a reduced closed word at a rooted edge.

    Any rotation of ``beta`` produces the same equation.  With no root
    occurrence the double-trace side is empty; plaquettes not meeting the
    root contribute nothing to the single-trace side.
    """
    if mode not in ("finite", "large"):
        raise ValueError(f"mode must be 'finite' or 'large', got {mode!r}")
    if q.is_self_loop(root):
        raise QuiverError(f"rooted edge {root!r} is a self-loop")
    if not is_reduced(beta):
        raise QuiverError("Wilson word must be reduced")
    if beta.steps and not q.is_closed(beta):
        raise QuiverError(f"word {beta} is not closed")
    # the trace only sees the cyclic reduction; normalise before splitting
    beta = EdgeWord(_cyclic_reduce(beta.steps))
    dec = root_decompose(q, beta, root)
    forward = not dec.signs or dec.signs[0] > 0

    lhs_raw: list[tuple[int, tuple[CyclicWord, CyclicWord]]] = []
    if dec.p:
        root_fwd = ((root, 1),)
        root_bwd = ((root, -1),)
        segs = []  # full segment steps: root occurrence + following subword
        for s, mu in zip(dec.signs, dec.between):
            segs.append(((root, s),) + mu.steps)
        prefix: tuple = ()
        for j in range(dec.p):
            sj = dec.signs[j]
            suffix = tuple(st for seg in segs[j:] for st in seg)
            mu_j = dec.between[j].steps
            rest = tuple(st for seg in segs[j + 1 :] for st in seg)
            if forward:
                # left translation: U -> exp(iY) U
                if sj > 0:
                    w1, w2 = prefix, suffix
                    sign = 1
                else:
                    w1, w2 = prefix + root_bwd, mu_j + rest
                    sign = -1
            else:
                # right translation: U -> U exp(iY)
                if sj > 0:
                    w1, w2 = prefix + root_fwd, mu_j + rest
                    sign = 1
                else:
                    w1, w2 = prefix, suffix
                    sign = -1
            pair = _sorted_pair(
                cyclic_canonical(q, EdgeWord(w1)), cyclic_canonical(q, EdgeWord(w2))
            )
            lhs_raw.append((sign, pair))
            prefix = prefix + segs[j]

    rhs_raw: list[tuple[int, CyclicWord, CyclicWord]] = []
    base = dec.rotated.steps
    if dec.p == 0 and beta.steps:
        # splices depart from the root's source; rebase the loop there
        verts = q.word_vertices(beta)
        anchor = q.source[root]
        if anchor in verts:
            base = beta.rotate(verts.index(anchor)).steps
        elif any(e == root for w in table.entries for e, _ in w.steps):
            raise QuiverError(
                f"loop {beta} does not visit the source of rooted edge {root!r}; "
                "the spliced terms are not expressible as closed words"
            )
    for gamma in table.entries:
        for o, i in _occurrence_rotations(gamma, root):
            rot_at = gamma.steps[i:] + gamma.steps[:i]  # starts with the occurrence
            rot_after = gamma.steps[i + 1 :] + gamma.steps[: i + 1]  # ends with it
            if forward:
                insert = rot_at if o > 0 else rot_after
            else:
                insert = rot_after if o > 0 else rot_at
            word = cyclic_canonical(q, EdgeWord(base + insert))
            rhs_raw.append((1 if o > 0 else -1, gamma, word))

    return LoopEquation(
        mode=mode,
        root=root,
        loop=cyclic_canonical(q, beta),
        lhs=_merge_lhs(lhs_raw),
        rhs=_merge_rhs(rhs_raw),
    )


def _primitive_root(w: CyclicWord) -> tuple[tuple, int]:
    """Smallest-period subword and the power it is raised to."""
    steps = w.steps
    n = len(steps)
    for period in range(1, n + 1):
        if n % period:
            continue
        if steps[period:] + steps[:period] == steps:
            return steps[:period], n // period
    return steps, 1


def factorize_large_N(eq: LoopEquation) -> MomentEquation:
    """Replace double-trace expectations by moment products, indexing every
    word as a signed power of one common primitive generator.

    The generator orientation is fixed to contain the rooted edge forward,
    so moment indices do not flip with the Wilson word's orientation.
    """
    if eq.mode != "large":
        raise ValueError("equation must be generated in large-N mode")

    generator: CyclicWord | None = None

    def orient(prim: CyclicWord) -> CyclicWord:
        prim_rev = prim.reverse()
        fwd = any(e == eq.root and o > 0 for e, o in prim.steps)
        rev_fwd = any(e == eq.root and o > 0 for e, o in prim_rev.steps)
        if fwd and not rev_fwd:
            return prim
        if rev_fwd and not fwd:
            return prim_rev
        return min(prim, prim_rev, key=lambda c: tuple(_step_sort_key(s) for s in c.steps))

    def index_of(w: CyclicWord) -> int:
        nonlocal generator
        if w.is_empty:
            return 0
        prim_steps, power = _primitive_root(w)
        # a rotation block of a canonical cyclic word is itself canonical
        prim = CyclicWord(prim_steps)
        if generator is None:
            generator = orient(prim)
        if prim == generator:
            return power
        if prim.reverse() == generator:
            return -power
        raise ValueError(f"word {w} is not a power of the common generator {generator}")

    lhs = tuple((t.coeff, index_of(t.words[0]), index_of(t.words[1])) for t in eq.lhs)
    rhs = tuple((t.multiplicity, t.plaquette, index_of(t.word)) for t in eq.rhs)
    if generator is None:
        generator = CyclicWord()
    return MomentEquation(generator=generator, lhs=lhs, rhs=rhs)


def _step_sort_key(step) -> tuple[str, int]:
    return (step[0], 0 if step[1] > 0 else 1)
