"""Independent verification of reduction types by explicit fiberwise blow-ups.

Nothing here knows about thresholds, excesses, or partition combinatorics.
The engine carries one polynomial per ramified fiber — beta minus the branch
value, rewritten in the coordinate of the current disc and stripped to
primitive form — and repeatedly blows up wherever two or more fiber points
still share a residue.  Each blow-up radius is read off a Newton polygon, so
every thickness in the resulting model is an exact rational number, and the
downstairs (target) tree is reconstructed from the images of the discs that
survive contraction.  Agreement with the discrete classifier is then a
genuine two-route check: same dual graphs, computed from different inputs by
different mathematics.

Conventions.  A "track" is a pair (label, branch value); its carried
polynomial V always has content 0, so its reduction is a nonzero polynomial
over F_p whose degree equals the number of fiber points (with multiplicity)
in the current closed disc.  Every blow-up is centered at an F_p-rational
residue; a repeated residual root outside F_p is reported as an error rather
than silently mishandled (ResidualRootOutsideFp) — it cannot arise for
covers whose critical points are rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import fppoly, kpoly, newton
from .cover import Cover, CriticalDivisor, branch_data, branch_label
from .dualgraph import DualGraphPair, VerticalMap
from .field import FieldContext, NotRepresentable, fmt_rat


class OracleError(Exception):
    """Base class for everything the blow-up engine can complain about."""


class NotIntegralCover(OracleError):
    """The cover has no integral model of the required shape.

    Carries the witness string from the integrality report.
    """

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"cover is not integral with p-th-power reduction: {witness}")


class CenterNotRoot(OracleError):
    """Asked to blow up at a residue that is not a residual root."""


class ResidualRootOutsideFp(OracleError):
    """A repeated or shared residual root is not F_p-rational.

    The engine only lifts rational centers; a multiple root of a residual
    polynomial outside the prime field would require an unramified extension
    of the base to continue, so the run stops loudly instead.
    """


class NonTermination(OracleError):
    """Blow-up count exceeded the stage budget (a safety valve, not math)."""


# ---------------------------------------------------------------------------
# state


class _Node:
    """One upstairs disc: its carried fiber polynomials and bookkeeping."""

    __slots__ = (
        "name",
        "parent",
        "thickness",
        "tracks",
        "m",
        "down_rep",
        "down_radius",
        "marks",
        "children",
        "kind",
    )

    def __init__(self, name, parent, thickness, tracks, m, down_rep, down_radius):
        self.name = name
        self.parent = parent
        self.thickness = thickness  # Fraction; None on the root
        self.tracks = tracks  # label -> primitive kpoly coefficients
        self.m = m  # local degree of the cover on this disc
        self.down_rep = down_rep  # a branch value inside the image disc
        self.down_radius = down_radius  # Fraction, radius of the image disc
        self.marks = []
        self.children = []
        self.kind = None  # "inseparable" | "etale", set while processing


@dataclass(frozen=True)
class Stage:
    """Trace record of one blow-up (raw history, before contraction)."""

    node: str  # child disc created
    parent: str
    residue: int
    lift: str
    nu: Fraction  # radius increment upstairs
    m: int  # local degree carried into the child
    k: int  # distinct fiber points inside the child disc
    participants: tuple  # track labels with points in the child
    residuals: dict  # label -> residual polynomial at the parent (string)

    def to_json(self):
        return {
            "node": self.node,
            "parent": self.parent,
            "residue": self.residue,
            "lift": self.lift,
            "nu": fmt_rat(self.nu),
            "m": self.m,
            "k": self.k,
            "participants": list(self.participants),
            "residuals": dict(self.residuals),
        }


class ModelState:
    """A partially or fully separated model: disc tree plus trace."""

    def __init__(self, cover, tracks):
        self.cover = cover
        self.ctx = cover.ctx
        self.track_values = dict(tracks)  # label -> branch value Element
        self.nodes = {}
        self.stages = []
        self.blowups = 0

    @property
    def root(self):
        return self.nodes["C"]


@dataclass(frozen=True)
class OracleResult:
    """Everything a verification run produces."""

    model: DualGraphPair
    stages: tuple
    blowups: int
    e: int  # ramification index the computation finally ran at
    labels: tuple

    def trace_json(self):
        return [s.to_json() for s in self.stages]


# ---------------------------------------------------------------------------
# construction of the naive model


def _default_tracks(cover):
    data = branch_data(cover)
    return [(branch_label(bp.value), bp.value) for bp in data.branch]


def fundamental_model(cover, tracks=None):
    """Set up the naive integral model and one track per ramified fiber.

    Checks that beta is integral with reduction X**p and that the reversed
    polynomial X**p * beta(1/X) reduces to the constant 1 (the chart at
    infinity is already fine, which is why only finite fibers need work).
    Raises NotIntegralCover otherwise.
    """
    report = cover.integrality()
    if not report:
        raise NotIntegralCover(report.witness)
    reversed_beta = list(reversed(cover.beta_list()))
    if kpoly.reduction(reversed_beta, cover.ctx) != [1]:
        raise NotIntegralCover("reversed polynomial does not reduce to 1")
    if tracks is None:
        tracks = _default_tracks(cover)
    state = ModelState(cover, tracks)
    p = cover.ctx.p
    beta = cover.beta_list()
    carried = {}
    for label, lam in tracks:
        if lam.val() < 0:
            raise NotIntegralCover(f"branch value {label} is not integral")
        prim, content = kpoly.primitive(kpoly.sub(beta, [lam]), cover.ctx)
        assert content == 0, "beta - lambda is monic integral, content must be 0"
        carried[label] = prim
    rep = state.track_values[min(state.track_values)]
    root = _Node("C", None, None, carried, p, rep, Fraction(0))
    root.marks.append(("inf", p))
    state.nodes["C"] = root
    return state


# ---------------------------------------------------------------------------
# one blow-up


@dataclass(frozen=True)
class BlowUpStep:
    """Result of a single explicit blow-up at a rational residue."""

    tracks: dict  # label -> carried polynomial on the child disc
    nu: Fraction
    m: int
    k: int
    participants: tuple


def _distinct_in_disc(g):
    """Distinct roots of strictly positive valuation, by squarefree count."""
    total = newton.positive_root_count(g)
    if total == 0:
        return 0, 0
    repeated = newton.positive_root_count(kpoly.gcd_k(g, kpoly.derivative(g)))
    return total - repeated, total


def blow_up(ctx, tracks, residue, nu=None):
    """Blow up the unit disc at an F_p-rational residue, rescaling every track.

    ``tracks`` maps labels to primitive polynomials on the current disc; the
    residue must be a root of at least one of their reductions (CenterNotRoot
    otherwise).  When ``nu`` is omitted the increment is the smallest radius
    at which anything separates, read off the Newton polygons.  Only the
    tracks with points at the residue are carried into the child.
    """
    p = ctx.p
    wbar = residue % p
    shifted = {}
    mults = {}
    for label in sorted(tracks):
        hbar = kpoly.reduction(tracks[label], ctx)
        mult = fppoly.root_multiplicity(hbar, wbar, p)
        if mult:
            mults[label] = mult
    if not mults:
        raise CenterNotRoot(f"residue {wbar} is not a root of any carried fiber")
    lift = ctx.from_rational(Fraction(wbar))
    k = 0
    best = None
    for label in sorted(mults):
        g = kpoly.translate(tracks[label], lift)
        shifted[label] = g
        distinct, total = _distinct_in_disc(g)
        assert total == mults[label], "polygon count disagrees with residual multiplicity"
        k += distinct
        v = newton.min_positive_root_valuation(g)
        if v is not None and (best is None or v < best):
            best = v
    m_values = sorted(set(mults.values()))
    if len(m_values) != 1:
        raise OracleError(
            f"local degree mismatch at residue {wbar}: {dict(sorted(mults.items()))}"
        )
    m = m_values[0]
    if nu is None:
        nu = best
    if nu is None:
        raise CenterNotRoot(
            f"all fiber points at residue {wbar} coincide; nothing separates"
        )
    nu = Fraction(nu)
    if nu <= 0:
        raise ValueError("blow-up increment must be positive")
    scale = ctx.uniformizer_power(nu)  # may raise NotRepresentable
    carried = {}
    for label in sorted(mults):
        prim, content = kpoly.primitive(kpoly.scale_arg(shifted[label], scale), ctx)
        assert content == m * nu, "image radius increment must be m * nu"
        carried[label] = prim
    return BlowUpStep(carried, nu, m, k, tuple(sorted(mults)))


# ---------------------------------------------------------------------------
# the separation loop


def _residual_table(node, ctx):
    """Residual roots per track, with irrational residues handled honestly.

    Returns (table, extra_marks) where table maps a rational residue to
    {label: multiplicity} and extra_marks lists simple marks at residues
    outside F_p.  A repeated irrational root, or one shared between two
    tracks, raises ResidualRootOutsideFp.
    """
    p = ctx.p
    table = {}
    cofactors = {}
    extra_marks = []
    for label in sorted(node.tracks):
        hbar = kpoly.reduction(node.tracks[label], ctx)
        if fppoly.degree(hbar) != node.m:
            raise OracleError(
                f"residual degree {fppoly.degree(hbar)} on {node.name} "
                f"differs from local degree {node.m}"
            )
        roots, cofactor = fppoly.rational_roots(hbar, p)
        for wbar, mult in roots.items():
            table.setdefault(wbar, {})[label] = mult
        if fppoly.degree(cofactor) > 0:
            if not fppoly.is_squarefree(cofactor, p):
                raise ResidualRootOutsideFp(
                    f"repeated residual root outside F_{p} on {node.name} "
                    f"(fiber {label}: cofactor {fppoly.fmt(cofactor)})"
                )
            cofactors[label] = cofactor
            extra_marks.extend([(label, 1)] * fppoly.degree(cofactor))
    labels = sorted(cofactors)
    for i, la in enumerate(labels):
        for lb in labels[i + 1 :]:
            if fppoly.degree(fppoly.gcd(cofactors[la], cofactors[lb], p)) > 0:
                raise ResidualRootOutsideFp(
                    f"fibers {la} and {lb} share a residual root outside F_{p} "
                    f"on {node.name}"
                )
    return table, extra_marks


def _set_kind(node, ctx):
    verdicts = set()
    for label in sorted(node.tracks):
        hbar = kpoly.reduction(node.tracks[label], ctx)
        verdicts.add(fppoly.is_zero(fppoly.deriv(hbar, ctx.p)))
    if len(verdicts) != 1:
        raise OracleError(f"inconsistent separability verdicts on {node.name}")
    node.kind = "inseparable" if verdicts.pop() else "etale"


def separate_fibers(cover, tracks=None, max_stages=2048):
    """Blow up until every fiber point sits alone, and return the full state.

    Raises NotRepresentable when a required radius falls outside the value
    group (callers enlarge the field and retry — see run_oracle), and
    NonTermination if the stage budget is exhausted.
    """
    state = fundamental_model(cover, tracks)
    ctx = state.ctx
    stack = ["C"]
    while stack:
        node = state.nodes[stack.pop()]
        _set_kind(node, ctx)
        table, extra_marks = _residual_table(node, ctx)
        node.marks.extend(extra_marks)
        residuals = {
            label: fppoly.fmt(kpoly.reduction(node.tracks[label], ctx))
            for label in sorted(node.tracks)
        }
        for wbar in sorted(table):
            parts = table[wbar]
            distinct_total = 0
            for label in sorted(parts):
                g = kpoly.translate(node.tracks[label], ctx.from_rational(Fraction(wbar)))
                distinct, _total = _distinct_in_disc(g)
                distinct_total += distinct
            if distinct_total == 1:
                (label,) = parts
                node.marks.append((label, parts[label]))
                continue
            step = blow_up(ctx, node.tracks, wbar, None)
            state.blowups += 1
            if state.blowups > max_stages:
                raise NonTermination(
                    f"exceeded {max_stages} blow-ups; the model is not separating"
                )
            child_name = f"{node.name}.{wbar}"
            rep = state.track_values[min(step.participants)]
            child = _Node(
                child_name,
                node.name,
                step.nu,
                step.tracks,
                step.m,
                rep,
                node.down_radius + step.m * step.nu,
            )
            state.nodes[child_name] = child
            node.children.append(child_name)
            state.stages.append(
                Stage(
                    node=child_name,
                    parent=node.name,
                    residue=wbar,
                    lift=fmt_rat(Fraction(wbar)),
                    nu=step.nu,
                    m=step.m,
                    k=step.k,
                    participants=step.participants,
                    residuals={la: residuals[la] for la in step.participants},
                )
            )
            stack.append(child_name)
    return state


def separation_status(cover, tracks=None):
    """Which fibers are already separated on the naive model.

    A fiber with n distinct points is separated exactly when its residual
    polynomial has n distinct roots, i.e. squarefree part of degree n.  On
    the naive model every residual is a p-th power, so the answer is False
    unless the fiber has a single point.
    """
    state = fundamental_model(cover, tracks)
    data = branch_data(cover)
    sizes = {branch_label(bp.value): len(bp.profile) for bp in data.branch}
    status = {}
    for label in sorted(state.root.tracks):
        hbar = kpoly.reduction(state.root.tracks[label], state.ctx)
        status[label] = fppoly.squarefree_degree(hbar, state.ctx.p) == sizes[label]
    return status


# ---------------------------------------------------------------------------
# assembling the dual graph pair


def _contract(state):
    """Remove unstable intermediate discs (no marks, a single child)."""
    names = list(state.nodes)
    for name in reversed(names):
        node = state.nodes.get(name)
        if node is None or node.parent is None:
            continue
        if node.marks or len(node.children) != 1:
            continue
        child = state.nodes[node.children[0]]
        assert child.m == node.m, "local degree must be constant along a chain"
        child.thickness = child.thickness + node.thickness
        child.parent = node.parent
        parent = state.nodes[node.parent]
        parent.children[parent.children.index(name)] = child.name
        del state.nodes[name]


def _val_at_least(x, r):
    v = x.val()
    return v.is_infinite or v.q >= r


class _Disc:
    __slots__ = ("radius", "rep", "name", "labels")

    def __init__(self, radius, rep):
        self.radius = radius
        self.rep = rep
        self.name = None
        self.labels = ()


def _image_discs(state):
    """The downstairs tree: distinct images of the surviving upstairs discs."""
    discs = []
    target = {}
    for name, node in state.nodes.items():
        found = None
        for disc in discs:
            if disc.radius == node.down_radius and _val_at_least(
                node.down_rep - disc.rep, disc.radius
            ):
                found = disc
                break
        if found is None:
            found = _Disc(node.down_radius, node.down_rep)
            discs.append(found)
        target[name] = found
    for disc in discs:
        disc.labels = tuple(
            label
            for label in sorted(state.track_values)
            if _val_at_least(state.track_values[label] - disc.rep, disc.radius)
        )
        if disc.radius == 0:
            disc.name = "D"
        else:
            disc.name = f"D({'+'.join(disc.labels)}@{fmt_rat(disc.radius)})"
    names = [d.name for d in discs]
    if len(set(names)) != len(names):
        raise OracleError("image discs do not have distinct names")
    return discs, target


def _disc_parent(disc, discs):
    best = None
    for other in discs:
        if other is disc or other.radius >= disc.radius:
            continue
        if not _val_at_least(disc.rep - other.rep, other.radius):
            continue
        if best is None or other.radius > best.radius:
            best = other
    return best


def _extract_partitions(state, target, y_marks):
    """Read realized splitting data off the graph, in canonical form.

    Wherever two branch values share their deepest disc and that disc has
    several upstairs components over it, each component contributes a group:
    its local degree together with the mark multiplicities from both fibers.
    """
    from .classifier import PartitionPair

    by_disc = {}
    for name, node in state.nodes.items():
        by_disc.setdefault(target[name].name, []).append(node)
    out = []
    for disc_name in sorted(by_disc):
        labels = tuple(sorted(set(y_marks.get(disc_name, ())) - {"inf"}))
        if len(labels) != 2:
            continue
        over = by_disc[disc_name]
        if len(over) < 2:
            continue
        la, lb = labels
        groups = []
        for node in sorted(over, key=lambda n: n.name):
            g1 = tuple(sorted(m for label, m in node.marks if label == la))
            g2 = tuple(sorted(m for label, m in node.marks if label == lb))
            stray = [label for label, _ in node.marks if label not in (la, lb)]
            if stray:
                raise OracleError(
                    f"component over {disc_name} carries marks {stray} "
                    f"from outside the colliding pair"
                )
            groups.append((node.m, g1, g2))
        pair = PartitionPair.from_groups(state.ctx.p, groups)
        out.append(((la, lb), pair.groups))
    return tuple(sorted(out))


def assemble_model(state):
    """Contract the raw blow-up tree and build the dual graph pair."""
    _contract(state)
    discs, target = _image_discs(state)
    x_marks = {}
    x_edges = []
    vertical = {}
    for name, node in state.nodes.items():
        x_marks[name] = tuple(sorted(node.marks))
        vertical[name] = VerticalMap(target[name].name, node.m, node.kind)
        if node.parent is not None:
            x_edges.append((node.parent, name, node.thickness))
    y_marks = {disc.name: [] for disc in discs}
    y_marks["D"].append("inf")
    for label in sorted(state.track_values):
        lam = state.track_values[label]
        best = None
        for disc in discs:
            if _val_at_least(lam - disc.rep, disc.radius):
                if best is None or disc.radius > best.radius:
                    best = disc
        y_marks[best.name].append(label)
    y_marks = {name: tuple(sorted(marks)) for name, marks in y_marks.items()}
    y_edges = []
    for disc in sorted(discs, key=lambda d: (d.radius, d.name)):
        parent = _disc_parent(disc, discs)
        if parent is not None:
            y_edges.append((parent.name, disc.name, disc.radius - parent.radius))
    partitions = _extract_partitions(state, target, y_marks)
    model = DualGraphPair(
        p=state.ctx.p,
        x_root="C",
        y_root="D",
        x_marks=x_marks,
        y_marks=y_marks,
        x_edges=x_edges,
        y_edges=y_edges,
        vertical=vertical,
        partitions=partitions,
    )
    model.validate()
    return model


# ---------------------------------------------------------------------------
# the retry harness


def _embed_cover(cover, tracks, new_e):
    old = cover.ctx
    ctx = old.enlarged(new_e)
    beta = [old.embed(c, ctx) for c in cover.beta_list()]
    points = tuple((old.embed(x, ctx), m) for x, m in cover.critical.points)
    embedded = Cover.from_beta(beta, CriticalDivisor(points, ctx.p), ctx)
    return embedded, [(label, old.embed(lam, ctx)) for label, lam in tracks]


def run_oracle(cover, max_stages=2048, max_enlargements=8):
    """Separate all fibers, enlarging the field whenever a radius demands it.

    Labels are fixed once, from the cover as given, so they stay comparable
    with the classifier's even after the computation moves to a bigger field.
    """
    tracks = _default_tracks(cover)
    labels = tuple(label for label, _ in tracks)
    current, current_tracks = cover, tracks
    for _ in range(max_enlargements + 1):
        try:
            state = separate_fibers(current, current_tracks, max_stages)
        except NotRepresentable as exc:
            current, current_tracks = _embed_cover(current, current_tracks, exc.needed_e)
            continue
        model = assemble_model(state)
        return OracleResult(
            model=model,
            stages=tuple(state.stages),
            blowups=state.blowups,
            e=state.ctx.e,
            labels=labels,
        )
    raise OracleError(
        f"field enlarged {max_enlargements} times without all radii becoming "
        f"representable; giving up"
    )
