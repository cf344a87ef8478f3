"""The two-sided dual graph of a semi-stable model of a cover.

One object holds both special fibers: the upstairs tree (components of the
model of the source line, each genus 0), the downstairs tree (target side),
the vertical map between them (degree and separability per component), edge
thicknesses on both sides as exact rationals, and the specializations of the
marked points — fiber points with their ramification indices upstairs,
branch values downstairs, "inf" for the point at infinity on both roots.

Structural laws every instance must satisfy (validate() checks them, and the
constructors in the classifier and the blow-up engine both run it):

  * both graphs are trees rooted at the components where "inf" specializes;
  * each downstairs edge thickness = (degree of the child's vertical map)
    x (upstairs thickness) — the scaling law of singular points;
  * over every downstairs component the vertical degrees sum to p.

Two models are compared by canonical rooted-tree encodings: a nested tuple
built bottom-up with children sorted, downstairs first, then upstairs with
each component annotated by the canonical id of its image.  Equality of
encodings is exactly label-respecting isomorphism of the pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .field import fmt_rat


class InvalidDualGraph(ValueError):
    """A structural law failed (not a tree, scaling law broken, bad degrees)."""


@dataclass(frozen=True)
class VerticalMap:
    target: str
    degree: int
    kind: str  # "inseparable" | "etale"
    notes: tuple = ()  # informational (e.g. wild/tame points); never compared


@dataclass
class DualGraphPair:
    p: int
    x_root: str
    y_root: str
    x_marks: dict  # name -> tuple of (label, multiplicity), upstairs
    y_marks: dict  # name -> tuple of labels, downstairs
    x_edges: list  # (parent, child, Fraction thickness), directed away from root
    y_edges: list
    vertical: dict  # x name -> VerticalMap
    partitions: tuple = ()  # ((pair_labels, groups), ...) canonical nested tuples

    # -- structure ------------------------------------------------------

    def x_children(self):
        ch = {name: [] for name in self.x_marks}
        for a, b, t in self.x_edges:
            ch[a].append((b, t))
        return ch

    def y_children(self):
        ch = {name: [] for name in self.y_marks}
        for a, b, t in self.y_edges:
            ch[a].append((b, t))
        return ch

    def validate(self):
        if self.x_root not in self.x_marks or self.y_root not in self.y_marks:
            raise InvalidDualGraph("root missing from component list")
        for side, comps, edges, root in (
            ("x", self.x_marks, self.x_edges, self.x_root),
            ("y", self.y_marks, self.y_edges, self.y_root),
        ):
            parents = {}
            for a, b, t in edges:
                if a not in comps or b not in comps:
                    raise InvalidDualGraph(f"{side}-edge {a}-{b} names unknown component")
                if b in parents:
                    raise InvalidDualGraph(f"{side}-component {b} has two parents")
                if t <= 0:
                    raise InvalidDualGraph(f"{side}-edge {a}-{b} has thickness {t} <= 0")
                parents[b] = a
            if root in parents:
                raise InvalidDualGraph(f"{side}-root {root} has a parent")
            if len(edges) != len(comps) - 1:
                raise InvalidDualGraph(f"{side}-graph is not a tree")
            for name in comps:
                seen, cur = set(), name
                while cur != root:
                    if cur in seen:
                        raise InvalidDualGraph(f"{side}-graph has a cycle at {cur}")
                    seen.add(cur)
                    if cur not in parents:
                        raise InvalidDualGraph(f"{side}-component {cur} is disconnected")
                    cur = parents[cur]
        for name in self.x_marks:
            if name not in self.vertical:
                raise InvalidDualGraph(f"component {name} has no vertical map")
            vm = self.vertical[name]
            if vm.target not in self.y_marks:
                raise InvalidDualGraph(f"{name} maps to unknown {vm.target}")
            if vm.kind not in ("inseparable", "etale"):
                raise InvalidDualGraph(f"{name} has unknown kind {vm.kind!r}")
        # roots map to roots
        if self.vertical[self.x_root].target != self.y_root:
            raise InvalidDualGraph("x-root does not map to y-root")
        # degree conservation over each downstairs component
        degsum = {name: 0 for name in self.y_marks}
        for name, vm in self.vertical.items():
            degsum[vm.target] += vm.degree
        for name, total in degsum.items():
            if total != self.p:
                raise InvalidDualGraph(
                    f"degrees over {name} sum to {total}, expected p = {self.p}"
                )
        # thickness scaling law along vertical edge images
        y_edge_map = {(a, b): t for a, b, t in self.y_edges}
        for a, b, t_up in self.x_edges:
            ya = self.vertical[a].target
            yb = self.vertical[b].target
            if ya == yb:
                raise InvalidDualGraph(
                    f"x-edge {a}-{b} maps to a single downstairs component {ya}"
                )
            if (ya, yb) not in y_edge_map:
                raise InvalidDualGraph(
                    f"image of x-edge {a}-{b} is not a downstairs edge {ya}-{yb}"
                )
            e_p = self.vertical[b].degree
            if y_edge_map[(ya, yb)] != e_p * t_up:
                raise InvalidDualGraph(
                    f"scaling law broken on {a}-{b}: down {y_edge_map[(ya, yb)]} "
                    f"!= {e_p} * {t_up}"
                )
        return self

    # -- canonical comparison -------------------------------------------

    def canonical_key(self):
        y_ids = {}

        def y_enc(name, thick):
            kids = sorted(y_enc(b, t) for b, t in self.y_children()[name])
            return (thick, tuple(sorted(self.y_marks[name])), tuple(kids))

        # assign canonical ids in the order of a DFS that visits children by
        # their encodings (identical subtrees are interchangeable, so the
        # resulting ids are well-defined up to swapping equal encodings)
        def y_assign(name):
            y_ids[name] = len(y_ids)
            for b, _t in sorted(
                self.y_children()[name], key=lambda bt: y_enc(bt[0], bt[1])
            ):
                y_assign(b)

        y_assign(self.y_root)
        y_form = y_enc(self.y_root, None)

        def x_enc(name, thick):
            vm = self.vertical[name]
            kids = sorted(x_enc(b, t) for b, t in self.x_children()[name])
            return (
                thick,
                tuple(sorted(self.x_marks[name])),
                (y_ids[vm.target], vm.degree, vm.kind),
                tuple(kids),
            )

        return (y_form, x_enc(self.x_root, None), self.partitions)

    def is_isomorphic_to(self, other):
        return self.canonical_key() == other.canonical_key()

    # -- serialization ----------------------------------------------------

    def to_json(self):
        def xcomp(name):
            vm = self.vertical[name]
            entry = {
                "name": name,
                "marks": [[lbl, m] for lbl, m in sorted(self.x_marks[name])],
                "map": {"to": vm.target, "degree": vm.degree, "kind": vm.kind},
            }
            if vm.notes:
                entry["map"]["notes"] = list(vm.notes)
            return entry

        return {
            "p": self.p,
            "x": {
                "root": self.x_root,
                "components": [xcomp(n) for n in sorted(self.x_marks)],
                "edges": [
                    [a, b, fmt_rat(t)]
                    for a, b, t in sorted(self.x_edges, key=lambda e: (e[0], e[1]))
                ],
            },
            "y": {
                "root": self.y_root,
                "components": [
                    {"name": n, "marks": sorted(self.y_marks[n])}
                    for n in sorted(self.y_marks)
                ],
                "edges": [
                    [a, b, fmt_rat(t)]
                    for a, b, t in sorted(self.y_edges, key=lambda e: (e[0], e[1]))
                ],
            },
            "partitions": [
                {
                    "pair": list(pair),
                    "groups": [
                        {"d": d, "fiber1": list(g1), "fiber2": list(g2)}
                        for d, g1, g2 in groups
                    ],
                }
                for pair, groups in self.partitions
            ],
        }

    def to_dot(self):
        lines = ["digraph dual_graph_pair {", "  rankdir=TB;", "  node [shape=box];"]
        lines.append('  subgraph cluster_x { label="X_k"; style=rounded;')
        for name in sorted(self.x_marks):
            marks = ",".join(
                f"{lbl}^{m}" if m > 1 else lbl for lbl, m in sorted(self.x_marks[name])
            )
            label = name if not marks else f"{name}\\n[{marks}]"
            lines.append(f'    "x_{name}" [label="{label}"];')
        for a, b, t in sorted(self.x_edges, key=lambda e: (e[0], e[1])):
            lines.append(
                f'    "x_{a}" -> "x_{b}" [label="{fmt_rat(t)}", dir=none];'
            )
        lines.append("  }")
        lines.append('  subgraph cluster_y { label="Y_k"; style=rounded;')
        for name in sorted(self.y_marks):
            marks = ",".join(sorted(self.y_marks[name]))
            label = name if not marks else f"{name}\\n[{marks}]"
            lines.append(f'    "y_{name}" [label="{label}"];')
        for a, b, t in sorted(self.y_edges, key=lambda e: (e[0], e[1])):
            lines.append(
                f'    "y_{a}" -> "y_{b}" [label="{fmt_rat(t)}", dir=none];'
            )
        lines.append("  }")
        for name in sorted(self.x_marks):
            vm = self.vertical[name]
            kind = "insep" if vm.kind == "inseparable" else "et"
            lines.append(
                f'  "x_{name}" -> "y_{vm.target}" '
                f'[style=dashed, label="{vm.degree} {kind}"];'
            )
        lines.append("}")
        return "\n".join(lines) + "\n"


def diff_pairs(a, b):
    """Human-readable first difference between two canonical encodings."""
    ka, kb = a.canonical_key(), b.canonical_key()
    if ka == kb:
        return None
    sections = ["downstairs tree", "upstairs tree", "partitions"]
    for i, section in enumerate(sections):
        if ka[i] != kb[i]:
            return (
                f"{section} differ:\n  left:  {ka[i]}\n  right: {kb[i]}"
            )
    return "encodings differ"
