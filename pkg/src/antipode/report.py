"""Full analysis pipeline and its JSON-ready report.

Exact quantities serialize as ``"p/q"`` strings with a 15-significant-digit
decimal alongside; JSON numbers are never used for them.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from decimal import Context, Decimal
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import EvidenceRequired, Inconclusive, NoCertificate
from .graphs import Graph, apsp_metric, bfs_distances, transitive_distribution
from .groups import AutomorphismSet, format_permutation
from .metric import (
    MAX_WITNESSES,
    DistanceDistribution,
    FiniteMetricSpace,
    Tier,
    bounds_from_distribution,
    classify_antipodality,
    detect_extremal_upper,
    distance_distribution,
    mu,
    symmetry_check,
    verify_involution_properties,
)
from .symmetry import (
    DEFAULT_BUDGET,
    TransitivityVerdict,
    automorphism_search,
    homogeneity_verdict,
    is_vertex_transitive,
    isometry_search,
)

# per-point antipode lists and generator images are listed only up to this size
LIST_LIMIT = 256
_CTX = Context(prec=15)


def decimal(x: Fraction) -> str:
    return str(_CTX.divide(Decimal(x.numerator), Decimal(x.denominator)))


def exact(x: Fraction | None) -> str | None:
    return None if x is None else str(x)


@dataclass
class AnalysisReport:
    descriptor: dict
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"tool": {"name": "antipode", "version": __version__}, "input": self.descriptor}
        out.update(self.data)
        out["results_digest"] = results_digest(out)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    @property
    def violations(self) -> list[str]:
        return self.data.get("violations", [])


_DIGEST_KEYS = ("n", "bounds", "distribution", "symmetry", "extremal")


def results_digest(report: dict) -> str:
    """Hash of the mathematical content, independent of how the input was supplied."""
    core = {k: report.get(k) for k in _DIGEST_KEYS}
    anti = report.get("antipodality") or {}
    core["tier"] = anti.get("tier")
    core["transitive"] = (report.get("transitivity") or {}).get("status")
    blob = json.dumps(core, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _bounds_block(b) -> dict:
    vals = {"D": b.D, "A": b.A, "A_bar": b.A_bar, "mu": b.mu, "E_d2": b.E_d2,
            "lower_bound": b.D / 2, "upper_bound": b.mu * b.D,
            "sq_lower_bound": b.D**2 / 8, "sq_upper_bound": b.D**2}
    block = {k: exact(v) for k, v in vals.items()}
    block.update({
        "lower_ok": b.lower_ok, "upper_ok": b.upper_ok,
        "sq_lower_ok": b.sq_lower_ok, "sq_upper_ok": b.sq_upper_ok,
        "lower_tight": b.lower_tight, "upper_tight": b.upper_tight,
    })
    block["decimal"] = {k: (None if v is None else decimal(v)) for k, v in vals.items()}
    return block


def _distribution_block(dist: DistanceDistribution) -> list[dict]:
    return [{"distance": exact(v), "mass": exact(m), "mass_decimal": decimal(m)} for v, m in dist.entries]


def _transitivity_block(verdict: TransitivityVerdict | None, auts: AutomorphismSet | None, note: str | None) -> dict:
    if verdict is None:
        return {"status": "skipped" if note is None else "inconclusive", "reason": note or "symmetry analysis disabled",
                "orbits": None, "group_order": None, "generators": None, "search_nodes": None, "truncated": None}
    gens = None
    if auts is not None and auts.n <= LIST_LIMIT:
        gens = [format_permutation(g) for g in auts.generators]
    return {
        "status": "certified" if verdict.transitive else "refuted",
        "reason": verdict.reason,
        "orbits": len(verdict.orbits) if verdict.orbits else None,
        "group_order": None if auts is None or auts.group_order is None else str(auts.group_order),
        "generators": gens,
        "search_nodes": None if auts is None else auts.nodes,
        "truncated": None if auts is None else auts.truncated,
    }


def _antipodality_block(rep) -> dict:
    counts = [len(a) for a in rep.antipodes]
    return {
        "tier": rep.tier.name,
        "antipode_count_min": min(counts),
        "antipode_count_max": max(counts),
        "antipodes": [list(a) for a in rep.antipodes] if len(counts) <= LIST_LIMIT else None,
        "antipodal_map": None if rep.antipodal_map is None else format_permutation(rep.antipodal_map),
        "witness_count": rep.violation_count,
        "witnesses": [list(w) for w in rep.witnesses[:MAX_WITNESSES]],
        "homogeneity_evidence": rep.homogeneity_evidence,
        "error": None,
    }


def _bound_failures(bounds) -> list[str]:
    checks = [(bounds.lower_ok, "D/2 <= A"), (bounds.upper_ok, "A <= mu*D"),
              (bounds.sq_lower_ok, "D^2/8 <= E[d^2]"), (bounds.sq_upper_ok, "E[d^2] <= D^2")]
    return [f"bound fails: {label}" for ok, label in checks if not ok]


def _violations(bounds, homogeneous, tier, sym, inv, upper) -> list[str]:
    # the bounds and the antipodal structure are claims about homogeneous spaces only
    if not homogeneous:
        return []
    out = _bound_failures(bounds)
    if tier is not None:
        strict = tier is Tier.STRICTLY_ANTIPODAL
        if strict != bounds.lower_tight:
            out.append("strictly antipodal and A == D/2 disagree")
        if strict and not sym.passed:
            out.append("strictly antipodal but distance distribution not symmetric")
        if strict and inv is not None and not inv.all_hold:
            out.append("antipodal map is not a central fixed-point-free isometric involution")
    if upper.is_extremal != bounds.upper_tight:
        out.append("scaled discrete metric and A == mu*D disagree")
    return out


def analyze_space(X: FiniteMetricSpace, descriptor: dict, evidence: AutomorphismSet | None = None, *,
                  verdict: TransitivityVerdict | None = None, search: bool = True,
                  budget: int = DEFAULT_BUDGET, verify_evidence: bool = True) -> AnalysisReport:
    """Bounds, distribution, antipodality and extremal checks on a finite space.

    Without ``evidence`` an isometry search supplies it, unless ``search`` is
    false, in which case antipodality reports ``EvidenceRequired``.
    """
    note = None
    if evidence is None and search:
        evidence = isometry_search(X, budget)
    if verdict is None and evidence is not None:
        try:
            verdict = homogeneity_verdict(X, evidence)
        except Inconclusive as exc:
            note = str(exc)
    dist = distance_distribution(X)
    bounds = bounds_from_distribution(dist, mu(X), X.n)
    sym = symmetry_check(dist, bounds.D)
    upper = detect_extremal_upper(X)
    data = {"n": X.n, "homogeneous": bool(verdict and verdict.transitive and X.uniform),
            "uniform_weights": X.uniform}
    data["transitivity"] = _transitivity_block(verdict, evidence, note)
    data["bounds"] = _bounds_block(bounds)
    tier, inv = None, None
    if X.n >= 2:
        try:
            rep = classify_antipodality(X, evidence, verify_evidence=verify_evidence)
            tier = rep.tier
            data["antipodality"] = _antipodality_block(rep)
            if rep.antipodal_map is not None and evidence is not None:
                inv = verify_involution_properties(rep.antipodal_map, X, evidence)
        except EvidenceRequired as exc:
            data["antipodality"] = {"tier": None, "error": "EvidenceRequired", "message": str(exc)}
    else:
        data["antipodality"] = {"tier": None, "error": "DegenerateSpace", "message": "one-point space"}
    data["involution"] = None if inv is None else {
        "is_involution": inv.is_involution, "fixed_point_free": inv.fixed_point_free,
        "is_isometry": inv.is_isometry, "commutes_with_generators": inv.commutes_with_generators,
        "even_cardinality": inv.even_cardinality}
    data["symmetry"] = {"passed": sym.passed, "first_violation": exact(sym.first_violation)}
    data["extremal"] = {"upper": upper.is_extremal, "upper_scale": exact(upper.scale),
                        "lower": None if tier is None else tier is Tier.STRICTLY_ANTIPODAL}
    data["distribution"] = _distribution_block(dist)
    data["violations"] = _violations(bounds, data["homogeneous"], tier, sym, inv, upper)
    data["seed"] = None
    return AnalysisReport(descriptor, data)


def analyze_graph(g: Graph, descriptor: dict, *, search: bool = True, budget: int = DEFAULT_BUDGET,
                  fast_path: bool = False) -> AnalysisReport:
    """Run the pipeline on a connected graph under its shortest-path metric.

    Evidence of transitivity comes from the construction certificate when the
    graph carries one, otherwise from automorphism search.
    """
    auts, verdict, note = None, None, None
    if search or fast_path:
        auts = g.automorphisms if g.automorphisms is not None else automorphism_search(g, budget)
        try:
            verdict = is_vertex_transitive(g, auts)
        except Inconclusive as exc:
            note = str(exc)
    if fast_path:
        if verdict is None or not verdict.transitive:
            raise NoCertificate("--fast-path needs a vertex-transitivity certificate")
        return _fast_report(g, descriptor, verdict)
    X = apsp_metric(g)
    report = analyze_space(X, descriptor, auts, verdict=verdict, search=False,
                           verify_evidence=g.automorphisms is None)
    if note is not None:
        report.data["transitivity"] = _transitivity_block(None, auts, note)
    return report


def _fast_report(g: Graph, descriptor: dict, verdict: TransitivityVerdict) -> AnalysisReport:
    # every vertex looks like vertex 0, so two BFS runs decide the antipodal tier
    dist = transitive_distribution(g, verdict)
    n = g.n
    bounds = bounds_from_distribution(dist, 1 - Fraction(1, n), n)
    sym = symmetry_check(dist, bounds.D)
    data = {"n": n, "homogeneous": True, "uniform_weights": True,
            "transitivity": _transitivity_block(verdict, verdict.automorphisms, None),
            "bounds": _bounds_block(bounds)}
    tier = None
    if n >= 2:
        d0 = bfs_distances(g, 0)
        top = int(d0.max())
        ants = np.flatnonzero(d0 == top)
        if ants.size == 1:
            dO = bfs_distances(g, int(ants[0]))
            bad = np.flatnonzero(d0 + dO != top)
            tier = Tier.STRICTLY_ANTIPODAL if bad.size == 0 else Tier.UNIQUELY_ANTIPODAL
            witnesses = [[0, int(y), int(ants[0])] for y in bad[:MAX_WITNESSES]]
            count = int(bad.size) * n
        else:
            tier, witnesses, count = Tier.ANTIPODAL, [], None
        data["antipodality"] = {
            "tier": tier.name, "antipode_count_min": int(ants.size), "antipode_count_max": int(ants.size),
            "antipodes": None, "antipodal_map": None, "witness_count": count, "witnesses": witnesses,
            "homogeneity_evidence": "fast path: vertex 0 profile extended by transitivity", "error": None,
            "antipodes_of_0": ants[:LIST_LIMIT].tolist()}
    data["involution"] = None
    data["symmetry"] = {"passed": sym.passed, "first_violation": exact(sym.first_violation)}
    upper = bounds.upper_tight
    data["extremal"] = {"upper": upper, "upper_scale": exact(bounds.D) if upper else None,
                        "lower": None if tier is None else tier is Tier.STRICTLY_ANTIPODAL}
    data["distribution"] = _distribution_block(dist)
    viol = _bound_failures(bounds)
    if tier is not None and (tier is Tier.STRICTLY_ANTIPODAL) != bounds.lower_tight:
        viol.append("strictly antipodal and A == D/2 disagree")
    data["violations"] = viol
    data["seed"] = None
    return AnalysisReport(descriptor, data)


def distribution_csv(report: dict) -> str:
    lines = ["distance,mass,mass_decimal"]
    lines += [f"{r['distance']},{r['mass']},{r['mass_decimal']}" for r in report["distribution"]]
    return "\n".join(lines) + "\n"


def load_schema(name: str) -> dict:
    """Shipped JSON schema: ``"analysis_report"`` or ``"sample_report"``."""
    from importlib.resources import files

    return json.loads(files("antipode").joinpath(f"schemas/{name}.schema.json").read_text(encoding="utf-8"))
