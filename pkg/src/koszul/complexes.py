"""Bigraded chain complexes with exact differentials.

Two layers: a FreeComplex is a complex of free graded modules described by
generator labels and an element-valued differential; realizing it over a
degree window (optionally through a quotient module) produces a
BigradedComplex, the flat object everything downstream consumes: ordered
labelled bases per bidegree (s, t) and one exact matrix per bidegree.

Differentials preserve the internal degree t, so each t-column of the window
is self-contained; the only edge uncertainty lives in the homological
direction, and homology_ranks marks it instead of guessing.
"""
from __future__ import annotations

from dataclasses import dataclass

from .linalg import (
    Coefficients,
    Matrix,
    VectorSpan,
    kernel_basis,
    rank_over_field,
    rational_rank,
    smith_normal_form,
)
from .rings import DegreeWindow, Element, FreeModuleBasis, RingSpec

HOMOLOGICAL = "homological"  # differential lowers s
COHOMOLOGICAL = "cohomological"  # differential raises s


class OracleMismatchError(Exception):
    """A brute-force computation disagreed with its closed form.

    This is a hard failure: one of the two pipelines is wrong, so no table
    is returned.  The witness dict locates the first disagreement.
    """

    def __init__(self, message: str, witness: dict):
        super().__init__(message)
        self.witness = witness


class DifferentialSquareError(Exception):
    """d after d failed to vanish on a freshly built complex."""

    def __init__(self, report: "DifferentialReport"):
        super().__init__(str(report))
        self.report = report


@dataclass(frozen=True)
class BasisLabel:
    """A module generator: exterior part, power multi-index part, cobar word.

    e_part is strictly increasing, u_part weakly increasing (both 1-based
    generator indices); word is a tuple of letters, each letter a strictly
    increasing tuple of primitive indices.
    """

    e_part: tuple[int, ...] = ()
    u_part: tuple[int, ...] = ()
    word: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.e_part, self.e_part[1:])):
            raise ValueError(f"exterior part {self.e_part} must be strictly increasing")
        if any(a > b for a, b in zip(self.u_part, self.u_part[1:])):
            raise ValueError(f"power multi-index {self.u_part} must be weakly increasing")

    def __str__(self):
        bits = []
        if self.e_part:
            bits.append("e(" + ",".join(map(str, self.e_part)) + ")")
        if self.u_part:
            bits.append("u~(" + ",".join(map(str, self.u_part)) + ")")
        if self.word:
            bits.append("[" + "|".join("t(" + ",".join(map(str, l)) + ")" for l in self.word) + "]")
        return "*".join(bits) if bits else "1"


UNIT_LABEL = BasisLabel()


def format_basis_element(label, mono: tuple[int, ...], ring: RingSpec) -> str:
    if any(mono):
        mono_str = "*".join(
            (f"{n}^{e}" if e != 1 else n)
            for (n, _), e in zip(ring.generators, mono)
            if e
        )
        return f"{label}*{mono_str}" if str(label) != "1" else mono_str
    return str(label)


@dataclass
class FreeGenerator:
    label: object
    hom: int  # homological (or cohomological) degree s
    internal: int  # internal degree t of the generator itself


class FreeComplex:
    """Free graded complex: generators with degrees, differential by label.

    diff maps a label to [(coefficient Element, target label)]; targets sit
    one homological step along `direction`.  complete_above means the listed
    generator levels are all there are (nothing was cut by the window).
    """

    def __init__(self, ring: RingSpec, direction: str = HOMOLOGICAL,
                 complete_above: bool = True, complete_below: bool = True):
        self.ring = ring
        self.direction = direction
        self.complete_above = complete_above
        self.complete_below = complete_below
        self.generators: dict[int, list[FreeGenerator]] = {}
        self.diff: dict[object, list[tuple[Element, object]]] = {}
        self._internal: dict[object, int] = {}

    def add_generator(self, label, hom: int, internal: int):
        if label in self._internal:
            raise ValueError(f"duplicate generator label {label}")
        self.generators.setdefault(hom, []).append(FreeGenerator(label, hom, internal))
        self._internal[label] = internal

    def internal_degree(self, label) -> int:
        return self._internal[label]

    def set_diff(self, label, terms):
        terms = [(c, tgt) for c, tgt in terms if not c.is_zero()]
        if terms:
            self.diff[label] = terms

    def hom_degrees(self) -> list[int]:
        return sorted(self.generators)

    def generator_count(self) -> int:
        return sum(len(v) for v in self.generators.values())

    def realize(self, window: DegreeWindow | None = None, module=None,
                description: str = "") -> "BigradedComplex":
        """Flatten to based matrices per bidegree over the window.

        module defaults to the free module on the ring's monomials; pass a
        QuotientModule to realize the complex tensored with that quotient.
        """
        w = window or self.ring.window
        mod = module or FreeModuleBasis(self.ring)
        coeffs = self.ring.coefficients
        step = -1 if self.direction == HOMOLOGICAL else 1
        basis: dict[tuple[int, int], list] = {}
        offsets: dict[tuple[int, int], dict] = {}  # (s,t) -> label -> row offset
        for s in self.hom_degrees():
            for t in w.degrees():
                entries = []
                offs = {}
                for gen in self.generators[s]:
                    offs[gen.label] = len(entries)
                    for mono in mod.basis(t - gen.internal):
                        entries.append((gen.label, mono))
                if entries:
                    basis[(s, t)] = entries
                    offsets[(s, t)] = offs
        diff: dict[tuple[int, int], Matrix] = {}
        for (s, t), entries in basis.items():
            tgt_key = (s + step, t)
            tgt_offs = offsets.get(tgt_key, {})
            m = Matrix(len(basis.get(tgt_key, ())), len(entries))
            for j, (label, mono) in enumerate(entries):
                for coeff_elem, tgt_label in self.diff.get(label, ()):
                    off = tgt_offs.get(tgt_label)
                    if off is None:
                        continue  # target slot empty at this t
                    prod = coeff_elem * self.ring.monomial(mono)
                    if prod.is_zero():
                        continue
                    red = mod.reduce(prod, t - self._internal[tgt_label])
                    for pos, v in red.items():
                        i = off + pos
                        m.set(i, j, coeffs.normalize(m.get(i, j) + v))
            diff[(s, t)] = m
        return BigradedComplex(
            coefficients=coeffs,
            direction=self.direction,
            basis=basis,
            diff=diff,
            window=w,
            s_levels=self.hom_degrees(),
            complete_above=self.complete_above,
            complete_below=self.complete_below,
            free=self,
            module=mod,
            description=description,
        )


@dataclass
class DifferentialViolation:
    s: int
    t: int
    kind: str  # "square" | "shape"
    detail: str


@dataclass
class DifferentialReport:
    ok: bool
    violations: list[DifferentialViolation]

    def __str__(self):
        if self.ok:
            return "differential check: PASS (d after d vanishes everywhere in window)"
        lines = ["differential check: FAIL"]
        for v in self.violations:
            lines.append(f"  ({v.s},{v.t}) {v.kind}: {v.detail}")
        return "\n".join(lines)


@dataclass
class HomologyEntry:
    rank: int
    torsion: tuple[int, ...] = ()
    certain: bool = True


class BigradedComplex:
    """Realized bigraded complex: ordered bases and exact matrices per (s,t)."""

    def __init__(self, coefficients: Coefficients, direction: str, basis: dict,
                 diff: dict, window: DegreeWindow, s_levels: list[int],
                 complete_above: bool = True, complete_below: bool = True,
                 free: FreeComplex | None = None, module=None, description: str = ""):
        self.coefficients = coefficients
        self.direction = direction
        self.basis = basis
        self.diff = diff
        self.window = window
        self.s_levels = s_levels
        self.complete_above = complete_above
        self.complete_below = complete_below
        self.free = free
        self.module = module
        self.description = description

    @property
    def step(self) -> int:
        return -1 if self.direction == HOMOLOGICAL else 1

    def dim(self, s: int, t: int) -> int:
        return len(self.basis.get((s, t), ()))

    def matrix(self, s: int, t: int) -> Matrix:
        got = self.diff.get((s, t))
        if got is not None:
            return got
        return Matrix(self.dim(s + self.step, t), self.dim(s, t))

    def bidegrees(self) -> list[tuple[int, int]]:
        return sorted(self.basis)

    @property
    def s_max_built(self) -> int:
        return max(self.s_levels) if self.s_levels else 0

    @property
    def s_min_built(self) -> int:
        return min(self.s_levels) if self.s_levels else 0

    def level_known(self, s: int) -> bool:
        """Is the chain module at homological level s fully described?"""
        if not self.s_levels:
            return self.complete_above and self.complete_below
        if s > self.s_max_built:
            return self.complete_above
        if s < self.s_min_built:
            return self.complete_below
        return True  # gaps between built levels are structurally zero


def verify_differential(c: BigradedComplex) -> DifferentialReport:
    """Check shapes and d after d = 0 on every window bidegree; violations are
    reported with located witnesses, never thrown."""
    violations: list[DifferentialViolation] = []
    for (s, t) in c.bidegrees():
        m = c.matrix(s, t)
        if m.cols != c.dim(s, t) or m.rows != c.dim(s + c.step, t):
            violations.append(
                DifferentialViolation(
                    s, t, "shape",
                    f"matrix is {m.rows}x{m.cols}, bases are "
                    f"{c.dim(s + c.step, t)}x{c.dim(s, t)}",
                )
            )
            continue
        m2 = c.matrix(s + c.step, t)
        if m2.cols != m.rows:
            continue  # shape fault reported at the neighbour
        prod = m2.compose(m, c.coefficients)
        if not prod.is_zero():
            (i, j), v = sorted(prod.entries.items())[0]
            label, mono = c.basis[(s, t)][j]
            violations.append(
                DifferentialViolation(
                    s, t, "square",
                    f"d(d({label}|{mono})) has entry {v} at target row {i}",
                )
            )
    return DifferentialReport(not violations, violations)


def homology_ranks(c: BigradedComplex, window: DegreeWindow | None = None,
                   jobs: int = 1) -> dict[tuple[int, int], HomologyEntry]:
    """Homology sizes per bidegree: rank over fields, rank plus torsion over Z.

    A bidegree is certain only when both neighbouring levels are fully
    described (inside the built range, or structurally zero beyond it);
    edge bidegrees get certain=False rather than a silent wrong answer.
    """
    w = window or c.window
    keys = [k for k in c.bidegrees() if w.t_min <= k[1] <= w.t_max]
    if jobs > 1:
        return _homology_ranks_parallel(c, keys, jobs)
    return {key: _homology_at(c, key) for key in keys}


def _homology_at(c: BigradedComplex, key: tuple[int, int]) -> HomologyEntry:
    s, t = key
    dim = c.dim(s, t)
    out = c.matrix(s, t)  # leaves (s,t)
    into = c.matrix(s - c.step, t)  # arrives at (s,t)
    certain = c.level_known(s + c.step) and c.level_known(s - c.step)
    if c.coefficients.is_field:
        rank_out = rank_over_field(out, c.coefficients)
        rank_in = rank_over_field(into, c.coefficients)
        return HomologyEntry(dim - rank_out - rank_in, (), certain)
    rank_out = rational_rank(out)
    rank_in = rational_rank(into)
    torsion = tuple(v for v in smith_normal_form(into) if v > 1)
    return HomologyEntry(dim - rank_out - rank_in, torsion, certain)


def _homology_ranks_parallel(c, keys, jobs):
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_homology_at_star, [(c, k) for k in keys], chunksize=4))
    return dict(zip(keys, results))


def _homology_at_star(args):
    return _homology_at(*args)


def nonzero_table(entries: dict[tuple[int, int], HomologyEntry]) -> dict[tuple[int, int], HomologyEntry]:
    return {k: v for k, v in entries.items() if v.rank or v.torsion}


@dataclass(frozen=True)
class TensorLabel:
    left: object
    right: object

    def __str__(self):
        return f"({self.left})x({self.right})"


def tensor_free(a: FreeComplex, b: FreeComplex) -> FreeComplex:
    """Tensor of free complexes over their common ring, Koszul signs included."""
    if a.ring != b.ring:
        raise ValueError("tensor factors live over different rings")
    if a.direction != b.direction:
        raise ValueError("tensor factors disagree on direction")
    out = FreeComplex(a.ring, a.direction,
                      complete_above=a.complete_above and b.complete_above,
                      complete_below=a.complete_below and b.complete_below)
    pairs: list[tuple[FreeGenerator, FreeGenerator]] = []
    for sa in a.hom_degrees():
        for ga in a.generators[sa]:
            for sb in b.hom_degrees():
                for gb in b.generators[sb]:
                    pairs.append((ga, gb))
    pairs.sort(key=lambda p: (p[0].hom + p[1].hom, p[0].hom, str(p[0].label), str(p[1].label)))
    for ga, gb in pairs:
        out.add_generator(TensorLabel(ga.label, gb.label), ga.hom + gb.hom,
                          ga.internal + gb.internal)
    for ga, gb in pairs:
        terms = []
        for coeff, tgt in a.diff.get(ga.label, ()):  # dx (x) y
            terms.append((coeff, TensorLabel(tgt, gb.label)))
        for coeff, tgt in b.diff.get(gb.label, ()):  # (-1)^s x (x) dy
            c = coeff if ga.hom % 2 == 0 else coeff.scaled(-1)
            terms.append((c, TensorLabel(ga.label, tgt)))
        out.set_diff(TensorLabel(ga.label, gb.label), terms)
    return out


def tensor_complexes(a: BigradedComplex, b: BigradedComplex) -> BigradedComplex:
    """Tensor over the common base ring, d(x@y) = dx@y + (-1)^s x@dy.

    Both factors must carry their free-over-the-ring structure: the tensor is
    formed on generator labels, not on realized bases (those are coefficient
    bases, and tensoring them would be a tensor over the coefficients).
    """
    if a.free is None or b.free is None:
        raise ValueError("tensor needs complexes realized from free descriptions")
    for c in (a, b):
        if c.module is not None and getattr(c.module, "relations", ()):
            raise ValueError("tensor factors must be realized over the free module")
    out = tensor_free(a.free, b.free)
    w = DegreeWindow(
        min(a.window.t_min, b.window.t_min),
        min(a.window.t_max, b.window.t_max),
        a.window.s_max,
        a.window.stage_max,
    )
    realized = out.realize(w, description=f"({a.description})x({b.description})")
    report = verify_differential(realized)
    if not report.ok:
        raise AssertionError(f"tensor differential broke: {report}")
    return realized


def shift_complex(c: BigradedComplex, k: int) -> BigradedComplex:
    """C[k]: basis at (s,t) is C at (s+k,t); the differential picks up (-1)^k."""
    basis = {(s - k, t): v for (s, t), v in c.basis.items()}
    diff = {}
    for (s, t), m in c.diff.items():
        if k % 2 == 0:
            shifted = m
        else:
            shifted = Matrix(m.rows, m.cols,
                             {key: c.coefficients.neg(v) for key, v in m.entries.items()})
        diff[(s - k, t)] = shifted
    return BigradedComplex(
        coefficients=c.coefficients,
        direction=c.direction,
        basis=basis,
        diff=diff,
        window=c.window,
        s_levels=[s - k for s in c.s_levels],
        complete_above=c.complete_above,
        complete_below=c.complete_below,
        free=None,
        module=c.module,
        description=f"{c.description}[{k}]",
    )


@dataclass
class HomologyBasis:
    """Representatives of homology classes at one bidegree, with coordinates.

    reps are sparse vectors in the chain basis; coords(v) expresses a cycle v
    in the representative classes (v must reduce to zero modulo image+reps).
    """

    reps: list[dict]
    span: VectorSpan
    rep_slots: list[int]

    def coords(self, v: dict) -> list:
        residual, combo = self.span.reduce(v)
        if residual:
            raise ValueError("vector is not a cycle modulo the recorded image")
        return [combo.get(slot, self.span.coeffs.zero) for slot in self.rep_slots]

    def is_boundary(self, v: dict) -> bool:
        return all(not x for x in self.coords(v))


def homology_basis_at(c: BigradedComplex, s: int, t: int) -> HomologyBasis:
    """Cycles modulo boundaries with explicit representatives (field only)."""
    if not c.coefficients.is_field:
        raise ValueError("homology representatives need field coefficients")
    out = c.matrix(s, t)
    into = c.matrix(s - c.step, t)
    span = VectorSpan(c.coefficients)
    for col in into.columns():
        span.insert(col)
    reps = []
    rep_slots = []
    for vec in kernel_basis(out, c.coefficients):
        slot = span.n_inserted
        if span.insert(vec):
            reps.append(vec)
            rep_slots.append(slot)
    return HomologyBasis(reps, span, rep_slots)
