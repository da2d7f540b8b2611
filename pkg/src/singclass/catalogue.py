"""Manifest-driven batch classification of curve families.

The manifest transcribes, family by family, the tangent cone, the support
of the allowed perturbation, the expected Newton polygon, and the tree
diagrams (with parameter ranges) that the family is known to produce.
Catalogue runs classify deterministic pseudo-random samples of each family,
expand every listed diagram template over its parameter ranges, and
deduplicate canonical keys per equivalence mode.

Two families carry a ``figure_anomaly`` note: their published figure does
not match what the expansion engine (and a hand computation) yields for
generic members.  Samples of those families are counted under the listed
figure's key so that headline counts reproduce the source tallies; the
report prints every such reconciliation, plus the strict engine-only count.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .classify import CanonicalKey, canonical_form, classify_curve
from .diagram import parse_diagram
from .errors import ConstraintUnsatisfiable, Exhausted, SchemaError, SingclassError
from .parser import parse_poly
from .poly import BivariatePoly
from .polygon import newton_polygon
from .puiseux import ExpansionSettings, expand_to_probranches, puiseux_expand

Q = Fraction


@dataclass
class ParamRange:
    """The {n/q : n = lo..hi} shorthand; a trailing '?' marks uncertainty."""
    q: int = 1
    lo: int = 0
    hi: int = 0
    uncertain: bool = False
    values: list | None = None          # explicit list of "p/q" strings

    def expand(self):
        if self.values is not None:
            return [Q(v) for v in self.values]
        return [Q(n, self.q) for n in range(self.lo, self.hi + 1)]

    def to_json(self):
        if self.values is not None:
            out = {"values": self.values}
        else:
            out = {"q": self.q, "lo": self.lo, "hi": self.hi}
        if self.uncertain:
            out["uncertain"] = True
        return out

    @staticmethod
    def from_json(obj, path="manifest"):
        if "values" in obj:
            return ParamRange(values=list(obj["values"]),
                              uncertain=bool(obj.get("uncertain", False)))
        try:
            return ParamRange(q=int(obj["q"]), lo=int(obj["lo"]),
                              hi=int(obj["hi"]),
                              uncertain=bool(obj.get("uncertain", False)))
        except KeyError as e:
            raise SchemaError(path, f"param range field {e}")


@dataclass
class DiagramSpec:
    template: str                        # diagram text, labels may be slots
    params: dict = field(default_factory=dict)     # slot -> ParamRange
    pair_values: list | None = None      # correlated slot tuples [(a, b), ...]
    pair_slots: list | None = None
    generic: bool = False                # produced by generic samples
    anomaly: str | None = None           # figure defect note
    engine_template: str | None = None   # what the engine actually produces

    def expand(self):
        """All concrete (key-text, assignHint) instances of this template."""
        out = []
        if self.pair_values is not None:
            slots = self.pair_slots or []
            for tup in self.pair_values:
                subs = dict(zip(slots, [str(Q(v)) for v in tup]))
                try:
                    out.append((self._substitute(subs), subs))
                except SingclassError:
                    out.append((None, subs))       # unexpandable, preserved
            return out
        if not self.params:
            return [(self._substitute({}), {})]
        names = sorted(self.params)
        for combo in itertools.product(*(self.params[n].expand() for n in names)):
            subs = {n: str(v) for n, v in zip(names, combo)}
            out.append((self._substitute(subs), subs))
        return out

    def _substitute(self, subs):
        text = self.template
        for name, val in subs.items():
            text = text.replace(f" {name} ", f" {val} ").replace(
                f"({name} ", f"({val} ")
        d = parse_diagram(text)
        _check_increasing(d.root, Q(0))
        return d

    def uncertain(self):
        return any(r.uncertain for r in self.params.values())

    def to_json(self):
        out = {"template": self.template}
        if self.params:
            out["params"] = {k: v.to_json() for k, v in self.params.items()}
        if self.pair_values is not None:
            out["pair_values"] = self.pair_values
            out["pair_slots"] = self.pair_slots
        if self.generic:
            out["generic"] = True
        if self.anomaly:
            out["anomaly"] = self.anomaly
        if self.engine_template:
            out["engine_template"] = self.engine_template
        return out

    @staticmethod
    def from_json(obj, path="manifest"):
        if "template" not in obj:
            raise SchemaError(path, "template")
        return DiagramSpec(
            template=obj["template"],
            params={k: ParamRange.from_json(v, path)
                    for k, v in obj.get("params", {}).items()},
            pair_values=obj.get("pair_values"),
            pair_slots=obj.get("pair_slots"),
            generic=bool(obj.get("generic", False)),
            anomaly=obj.get("anomaly"),
            engine_template=obj.get("engine_template"),
        )


def _check_increasing(node, floor):
    if node.is_leaf():
        return
    if node.split <= floor:
        raise SingclassError(
            f"diagram labels must strictly increase (got {node.split} after {floor})")
    for c in node.children:
        _check_increasing(c, node.split)


@dataclass
class FamilySpec:
    id: str
    polygon_id: str
    multiplicity: int
    tangent_cone: str                   # expression, may contain A, B params
    cone_params: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    perturbation: list = field(default_factory=list)   # monomial strings
    expected_polygon: list = field(default_factory=list)  # [[a, b], ...]
    diagrams: list = field(default_factory=list)
    notes: str = ""
    realize: dict | None = None          # hints for find_realizations

    def to_json(self):
        out = {
            "id": self.id,
            "polygon": self.polygon_id,
            "multiplicity": self.multiplicity,
            "tangent_cone": self.tangent_cone,
            "cone_params": self.cone_params,
            "constraints": self.constraints,
            "perturbation": self.perturbation,
            "expected_polygon": self.expected_polygon,
            "diagrams": [d.to_json() for d in self.diagrams],
        }
        if self.notes:
            out["notes"] = self.notes
        if self.realize:
            out["realize"] = self.realize
        return out

    @staticmethod
    def from_json(obj, path="manifest"):
        for fld in ("id", "polygon", "multiplicity", "tangent_cone"):
            if fld not in obj:
                raise SchemaError(path, fld)
        return FamilySpec(
            id=obj["id"],
            polygon_id=obj["polygon"],
            multiplicity=int(obj["multiplicity"]),
            tangent_cone=obj["tangent_cone"],
            cone_params=list(obj.get("cone_params", [])),
            constraints=list(obj.get("constraints", [])),
            perturbation=list(obj.get("perturbation", [])),
            expected_polygon=[list(map(int, p))
                              for p in obj.get("expected_polygon", [])],
            diagrams=[DiagramSpec.from_json(d, path)
                      for d in obj.get("diagrams", [])],
            notes=obj.get("notes", ""),
            realize=obj.get("realize"),
        )


def load_manifest(path=None) -> list[FamilySpec]:
    """Load family specs from a JSON manifest (default: packaged data)."""
    if path is None:
        with resources.files("singclass.data").joinpath("families.json").open() as fh:
            data = json.load(fh)
        path = "families.json"
    else:
        with open(path) as fh:
            data = json.load(fh)
    if not isinstance(data, dict) or "families" not in data:
        raise SchemaError(str(path), "families")
    return [FamilySpec.from_json(obj, str(path)) for obj in data["families"]]


def dump_manifest(families, fh):
    json.dump({"families": [f.to_json() for f in families]}, fh, indent=1)


# ---------------------------------------------------------------------------
# constraint checking and sampling
# ---------------------------------------------------------------------------

def _check_constraint(expr: str, values: dict) -> bool:
    expr = expr.strip()
    for op in ("!=", ">=", "<=", ">", "<", "=="):
        if op in expr:
            lhs, rhs = expr.split(op)
            a = _const_eval(lhs.strip(), values)
            b = _const_eval(rhs.strip(), values)
            return {"!=": a != b, ">": a > b, "<": a < b,
                    ">=": a >= b, "<=": a <= b, "==": a == b}[op]
    raise SchemaError("manifest", "constraint", expr)


def _const_eval(token: str, values: dict) -> Fraction:
    if token in values:
        return values[token]
    return Q(token)


_COEFF_POOL = [Q(p, q) for p in range(-9, 10) for q in range(1, 5) if p != 0]


def instantiate(spec: FamilySpec, values: dict, coeffs: list) -> BivariatePoly:
    """Curve for given cone-parameter values and perturbation coefficients."""
    cone_expr = spec.tangent_cone
    for name, v in values.items():
        cone_expr = cone_expr.replace(name, f"({v})")
    f = parse_poly(cone_expr)
    for mono, c in zip(spec.perturbation, coeffs):
        if c != 0:
            f = f + parse_poly(f"({c})*{mono}")
    return f


def sample_instances(spec: FamilySpec, n: int, seed: int,
                     max_tries: int = 80) -> list[BivariatePoly]:
    """Deterministic generic samples of the family.

    Every sample satisfies the listed constraints, has the expected
    multiplicity, and realizes the expected Newton polygon (so the hull
    endpoints are automatically nonzero, matching the source convention).
    """
    rng = random.Random(f"{spec.id}:{seed}")
    out = []
    expected_vertices = [tuple(p) for p in spec.expected_polygon]
    for k in range(n):
        for attempt in range(max_tries):
            values = {p: rng.choice(_COEFF_POOL) for p in spec.cone_params}
            if not all(_check_constraint(c, values) for c in spec.constraints):
                continue
            coeffs = [rng.choice(_COEFF_POOL) for _ in spec.perturbation]
            try:
                f = instantiate(spec, values, coeffs)
                if f.multiplicity() != spec.multiplicity:
                    continue
                if expected_vertices:
                    poly = newton_polygon(f)
                    if [v for v in poly.vertices] != expected_vertices:
                        continue
                out.append(f)
                break
            except SingclassError:
                continue
        else:
            raise ConstraintUnsatisfiable(
                f"{spec.id}: no generic sample found in {max_tries} tries")
    return out


# ---------------------------------------------------------------------------
# catalogue runs
# ---------------------------------------------------------------------------

@dataclass
class CatalogueReport:
    per_multiplicity: dict = field(default_factory=dict)
    reconciliations: list = field(default_factory=list)
    uncertain_entries: list = field(default_factory=list)
    unexpandable: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    settings: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "per_multiplicity": {
                str(m): {
                    "distinct_real": v["distinct_real"],
                    "distinct_complex": v["distinct_complex"],
                    "distinct_real_engine_strict": v["distinct_real_engine_strict"],
                    "provisional": v["provisional"],
                    "keys_real": v["keys_real"],
                    "keys_complex": v["keys_complex"],
                    "provenance": v["provenance"],
                }
                for m, v in sorted(self.per_multiplicity.items())
            },
            "reconciliations": self.reconciliations,
            "uncertain_entries": self.uncertain_entries,
            "unexpandable": self.unexpandable,
            "errors": self.errors,
            "settings": self.settings,
        }


def _classify_sample_task(args):
    expr, prec = args
    settings = ExpansionSettings(precision_bits=prec)
    r = classify_curve(parse_poly(expr), settings)
    return (r.key_real.text, r.key_complex.text, sorted(r.flags))


def run_catalogue(families, settings: ExpansionSettings | None = None,
                  samples_per_family: int = 0, seed: int = 0,
                  jobs: int = 1) -> CatalogueReport:
    settings = settings or ExpansionSettings()
    report = CatalogueReport(settings={
        "samples_per_family": samples_per_family, "seed": seed,
        "precision_bits": settings.precision_bits,
    })
    by_mult = {}

    def bucket(m):
        if m not in by_mult:
            by_mult[m] = {
                "real": {}, "complex": {}, "engine_real": set(),
                "provisional": 0, "provenance": {},
            }
        return by_mult[m]

    # listed diagrams
    for fam in sorted(families, key=lambda f: f.id):
        b = bucket(fam.multiplicity)
        for di, dspec in enumerate(fam.diagrams):
            for diagram, subs in dspec.expand():
                src = f"{fam.id}/diagram{di}" + (
                    f"@{','.join(f'{k}={v}' for k, v in sorted(subs.items()))}"
                    if subs else "")
                if diagram is None:
                    report.unexpandable.append(
                        {"source": src, "reason": "labels not a valid chain",
                         "values": subs})
                    continue
                kr = canonical_form(diagram, "real").text
                kc = canonical_form(diagram, "complex").text
                b["real"].setdefault(kr, []).append(src)
                b["complex"].setdefault(kc, []).append(src)
                b["provenance"].setdefault(kr, []).append(src)
                if dspec.uncertain():
                    report.uncertain_entries.append({"source": src, "key": kr})

    # generic samples
    tasks = []
    task_meta = []
    for fam in sorted(families, key=lambda f: f.id):
        if samples_per_family <= 0:
            continue
        try:
            instances = sample_instances(fam, samples_per_family, seed)
        except SingclassError as e:
            report.errors.append({"family": fam.id, "error": str(e)})
            continue
        for si, inst in enumerate(instances):
            tasks.append((str(inst), settings.precision_bits))
            task_meta.append((fam, si))

    if jobs > 1 and len(tasks) > 1:
        import multiprocessing as mp_
        with mp_.Pool(jobs) as pool:
            results = pool.map(_classify_sample_task, tasks)
    else:
        results = [_classify_sample_task(t) for t in tasks]

    for (fam, si), res in zip(task_meta, results):
        if isinstance(res, Exception):  # pragma: no cover
            report.errors.append({"family": fam.id, "error": str(res)})
            continue
        kr, kc, flags = res
        b = bucket(fam.multiplicity)
        b["engine_real"].add(kr)
        if flags:
            b["provisional"] += 1
        src = f"{fam.id}/sample{si}(seed={seed})"
        listed_real = set()
        for dspec in fam.diagrams:
            for diagram, _ in dspec.expand():
                if diagram is not None:
                    listed_real.add(canonical_form(diagram, "real").text)
        if kr in listed_real:
            b["real"].setdefault(kr, []).append(src)
            b["complex"].setdefault(kc, []).append(src)
            b["provenance"].setdefault(kr, []).append(src)
            continue
        # engine key not among this family's listed figures: reconcile
        override = None
        for dspec in fam.diagrams:
            if dspec.engine_template is not None:
                eng = canonical_form(parse_diagram(dspec.engine_template),
                                     "real").text
                if eng == kr:
                    override = dspec
                    break
        if override is not None:
            listed_key = canonical_form(
                parse_diagram(override.template), "real").text
            b["real"].setdefault(listed_key, []).append(src)
            b["provenance"].setdefault(listed_key, []).append(src)
            kc_listed = canonical_form(
                parse_diagram(override.template), "complex").text
            b["complex"].setdefault(kc_listed, []).append(src)
            report.reconciliations.append({
                "family": fam.id, "sample": src,
                "engine_key": kr, "listed_key": listed_key,
                "note": override.anomaly or "figure anomaly",
            })
        else:
            b["real"].setdefault(kr, []).append(src)
            b["complex"].setdefault(kc, []).append(src)
            b["provenance"].setdefault(kr, []).append(src)
            report.reconciliations.append({
                "family": fam.id, "sample": src, "engine_key": kr,
                "listed_key": None,
                "note": "sample key not among the family's listed figures",
            })

    for m, b in by_mult.items():
        # strict count: listed keys united with raw engine keys (no overrides)
        strict = len(set(b["real"]) | b["engine_real"])
        report.per_multiplicity[m] = {
            "distinct_real": len(b["real"]),
            "distinct_complex": len(b["complex"]),
            "distinct_real_engine_strict": strict,
            "provisional": b["provisional"],
            "keys_real": sorted(b["real"]),
            "keys_complex": sorted(b["complex"]),
            "provenance": {k: sorted(v) for k, v in b["provenance"].items()},
        }
    return report


# ---------------------------------------------------------------------------
# realization search
# ---------------------------------------------------------------------------

def _slot_targets(spec: FamilySpec, target: Fraction):
    """Complex-mode keys of every slotted template at the target value."""
    keys = set()
    for dspec in spec.diagrams:
        if not dspec.params:
            continue
        names = sorted(dspec.params)
        if len(names) != 1:
            continue
        try:
            d = dspec._substitute({names[0]: str(target)})
        except SingclassError:
            continue
        keys.add(canonical_form(d, "complex").text)
    return keys


def _deepest_pair_gap(f, settings):
    """(max contact, coefficient gap at it) over all pro-branch pairs."""
    from .contact import contact_exponent
    cycles, _ = puiseux_expand(f, settings)
    branches = expand_to_probranches(cycles, settings)
    best = None
    for i in range(len(branches)):
        for j in range(i + 1, len(branches)):
            e = contact_exponent(branches[i], branches[j], settings)
            if best is None or e > best[0]:
                t1 = dict(branches[i].terms)
                t2 = dict(branches[j].terms)
                c1 = t1.get(e)
                c2 = t2.get(e)
                gap = (c1.v if c1 else 0) - (c2.v if c2 else 0)
                best = (e, gap)
    return best


def find_realizations(spec: FamilySpec, target, settings=None,
                      budget: int = 60, seed: int = 1):
    """Search for an instance whose diagram carries the target label.

    Grid sampling plus a stratum chase: starting from an exact-rational
    instance, repeatedly cancel the coefficient that separates the deepest
    branch pair by solving for one perturbation coefficient (the curve is
    linear in each, so a two-point secant gives the root), pushing the
    separation exponent upward until the target is reached or the budget
    runs out.  Exhaustion is NOT a nonexistence proof.
    """
    settings = settings or ExpansionSettings()
    target = Q(target)
    target_keys = _slot_targets(spec, target)
    if not target_keys:
        raise Exhausted("no parameterized label position matches the target")
    verify_settings = ExpansionSettings(
        precision_bits=settings.precision_bits * 2, tol=settings.tol,
        max_depth=settings.max_depth)

    def check(f):
        r = classify_curve(f, settings)
        if r.key_complex.text in target_keys:
            r2 = classify_curve(f, verify_settings)
            if r2.key_complex.text in target_keys:
                return r2
        return None

    # phase 1: plain samples
    spent = 0
    for inst in sample_instances(spec, min(6, budget // 4 + 1), seed):
        spent += 1
        r = check(inst)
        if r is not None:
            return [(inst, r)]

    # phase 2: stratum chase from hinted or default start
    hints = (spec.realize or {})
    start_values = {p: Q(v) for p, v in hints.get(
        "cone_values", {}).items()}
    rng = random.Random(f"realize:{spec.id}:{seed}")
    values = {p: start_values.get(p, rng.choice(_COEFF_POOL))
              for p in spec.cone_params}
    tries = 0
    while not all(_check_constraint(c, values) for c in spec.constraints):
        values = {p: rng.choice(_COEFF_POOL) for p in spec.cone_params}
        tries += 1
        if tries > 50:
            raise Exhausted("constraints unsatisfiable in chase start")
    base_coeffs = {m: Q(hints.get("coeffs", {}).get(m, 0))
                   for m in spec.perturbation}
    for m in spec.perturbation:
        if m not in hints.get("coeffs", {}):
            base_coeffs[m] = Q(0)
    # default start: endpoint monomials on, everything else off
    if not hints.get("coeffs"):
        base_coeffs[spec.perturbation[0]] = Q(1)
        base_coeffs[spec.perturbation[-1]] = Q(1)

    tweak_list = hints.get("tweaks", list(reversed(spec.perturbation)))

    def build():
        return instantiate(spec, values,
                           [base_coeffs[m] for m in spec.perturbation])

    for step in range(budget - spent):
        f = build()
        try:
            r = check(f)
        except SingclassError:
            r = None
        if r is not None:
            return [(f, r)]
        try:
            dp = _deepest_pair_gap(f, settings)
        except SingclassError:
            raise Exhausted("chase instance degenerated")
        if dp is None:
            raise Exhausted("no branch pair to chase")
        ell, gap = dp
        if ell >= target:
            # deepest pair is at/past target but key mismatch: bad stratum
            raise Exhausted(f"stratum overshoot at {ell}")
        progressed = False
        for mono in tweak_list:
            v0 = base_coeffs[mono]
            base_coeffs[mono] = v0 + 1
            try:
                dp1 = _deepest_pair_gap(build(), settings)
            except SingclassError:
                base_coeffs[mono] = v0
                continue
            base_coeffs[mono] = v0
            if dp1 is None or dp1[0] != ell:
                continue
            slope = dp1[1] - gap
            if abs(slope) < 1e-20:
                continue
            root = -gap / slope
            if abs(root.imag if hasattr(root, "imag") else 0) > 1e-12:
                continue
            guess = Fraction(float(root.real if hasattr(root, "real") else root)
                             ).limit_denominator(4096) + v0
            base_coeffs[mono] = guess
            try:
                dp2 = _deepest_pair_gap(build(), settings)
            except SingclassError:
                base_coeffs[mono] = v0
                continue
            if dp2 is not None and dp2[0] > ell:
                progressed = True
                break
            base_coeffs[mono] = v0
        if not progressed:
            raise Exhausted(f"no tweak advances past exponent {ell}")
    raise Exhausted("budget exhausted")
