"""Cluster experiments on automorphic images of random words.

Pipeline: sample cyclically reduced words (W1), minimize the few that are
not minimal (W2), replace some elements w by phi(w) for phi drawn from a
fixed set whenever that makes them longer (W3).  Each element of W3 is
described by its normalized Whitehead graph.  Every phi predicts a cluster
centre, the graph of phi applied to an Euler word, and a Whitehead
automorphism tau_phi that shortens the members of its cluster.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .autos import Automorphism, CharPair, is_simple, parse_automorphism, wh2_images
from .core import (
    CyclicWord,
    _sample_cyclically_reduced,
    cyclic_reduce,
    make_rng,
    reduced_words,
    sample_reduced,
    window_counts,
)
from .graph import graph_distance, header, normalized_graph
from .ideal import IdealError, ideal_step, phi_nA_graph, stretch_factor
from .minimizer import is_strictly_minimal, minimize

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    k: int = 2
    sample_size: int = 1000
    word_length: int = 1000
    automorphisms: list[str] = field(default_factory=lambda: ["a->ab, b->b"])
    apply_probability: float = 0.5
    epsilon: float = 0.05
    seed: int = 0
    out_dir: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError("k must be at least 2")
        if self.sample_size < 1:
            raise ConfigError("sample_size must be at least 1")
        if self.word_length < 2:
            raise ConfigError("word_length must be at least 2")
        if not self.automorphisms:
            raise ConfigError("the automorphism set must be nonempty")
        if not 0 <= self.apply_probability <= 1:
            raise ConfigError("apply_probability must lie in [0, 1]")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError(str(e)) from None

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path}: {e}") from None
        return cls.from_dict(data)

    def parsed_automorphisms(self) -> list[Automorphism]:
        out = []
        for lit in self.automorphisms:
            try:
                phi = parse_automorphism(lit, self.k)
            except ValueError as e:
                raise ConfigError(f"bad automorphism {lit!r}: {e}") from None
            if is_simple(phi):
                raise ConfigError(
                    f"{lit!r} is simple (relabeling times inner); it predicts no cluster"
                )
            out.append(phi)
        return out


@dataclass
class Cluster:
    label: str
    tau: dict
    stretch: dict
    centroid: list[float]
    size: int = 0
    mean_distance: float | None = None
    p95_distance: float | None = None
    max_distance: float | None = None
    fraction_reduced: float | None = None
    fraction_within_epsilon: float | None = None


@dataclass
class ClusterReport:
    config: dict
    header: list[str]
    records: list[dict]
    clusters: list[Cluster]
    centroid_distances: list[list[float]]
    nonminimal_in_w1: int

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "header": self.header,
            "nonminimal_in_w1": self.nonminimal_in_w1,
            "clusters": [asdict(c) for c in self.clusters],
            "centroid_distances": self.centroid_distances,
            "records": self.records,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def transformed(self) -> list[dict]:
        return [r for r in self.records if r["label"] is not None]


def _sample_record(args) -> dict:
    """One element of W3; a pure function of its seed."""
    i, seed_seq, k, length, p, autos, taus, centroids = args
    rng = np.random.default_rng(seed_seq)
    w1, _ = _sample_cyclically_reduced(length, rng, k)
    trace = minimize(w1, k)
    w = trace.result
    label = None
    f = w
    if p > 0 and rng.random() < p:
        j = int(rng.integers(len(autos)))
        img = autos[j].apply_cyclic(w)
        if len(img) > len(w):
            label, f = j, img
    feats = normalized_graph(f, k)
    dists = [graph_distance(feats, c) for c in centroids]
    rec = {
        "id": i,
        "label": label,
        "minimization_steps": len(trace.steps),
        "word_length": len(w),
        "image_length": len(f),
        "features": list(feats.labels),
        "centroid_distances": dists,
        "nearest_centroid": int(np.argmin(dists)) if dists else None,
        "centroid_distance": None,
        "reduced_by_tau": None,
    }
    if label is not None:
        rec["centroid_distance"] = dists[label]
        rec["reduced_by_tau"] = taus[label].cyclic_length_of(f) < len(f)
    return rec


def run_experiment(cfg: ExperimentConfig) -> ClusterReport:
    autos = cfg.parsed_automorphisms()
    taus: list[CharPair] = []
    centroids = []
    clusters = []
    for lit, phi in zip(cfg.automorphisms, autos):
        try:
            tau = ideal_step(phi)
        except IdealError as e:
            raise ConfigError(f"{lit!r}: {e}") from None
        taus.append(tau)
        c = phi_nA_graph(phi)
        centroids.append(c)
        lam = stretch_factor(phi).value
        clusters.append(
            Cluster(
                label=lit,
                tau=tau.to_dict(),
                stretch={"num": lam.numerator, "den": lam.denominator},
                centroid=list(c.labels),
            )
        )
    tau_autos = [wh2_images(t, cfg.k) for t in taus]
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.sample_size)
    jobs = [
        (i, s, cfg.k, cfg.word_length, cfg.apply_probability, autos, tau_autos, centroids)
        for i, s in enumerate(seeds)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            records = list(ex.map(_sample_record, jobs, chunksize=32))
    else:
        records = [_sample_record(j) for j in jobs]
    for j, cl in enumerate(clusters):
        members = [r for r in records if r["label"] == j]
        cl.size = len(members)
        if members:
            d = np.array([r["centroid_distance"] for r in members])
            cl.mean_distance = float(d.mean())
            cl.p95_distance = float(np.percentile(d, 95))
            cl.max_distance = float(d.max())
            cl.fraction_reduced = sum(r["reduced_by_tau"] for r in members) / len(members)
            cl.fraction_within_epsilon = float((d <= cfg.epsilon).mean())
    for r in records:
        if r["label"] is not None:
            r["label"] = cfg.automorphisms[r["label"]]
    matrix = [[graph_distance(a, b) for b in centroids] for a in centroids]
    log.info("experiment done: %d records, %d clusters", len(records), len(clusters))
    return ClusterReport(
        config=asdict(cfg),
        header=header(cfg.k),
        records=records,
        clusters=clusters,
        centroid_distances=matrix,
        nonminimal_in_w1=sum(1 for r in records if r["minimization_steps"]),
    )


def nearest_centroid_classify(report: ClusterReport) -> float:
    """Fraction of transformed elements whose nearest predicted centre is their own."""
    labels = [c.label for c in report.clusters]
    if not labels:
        raise ConfigError("report has no clusters")
    members = report.transformed()
    if not members:
        return float("nan")
    hits = sum(1 for r in members if labels[r["nearest_centroid"]] == r["label"])
    return hits / len(members)


def separation(report: ClusterReport) -> tuple[float, float]:
    """(smallest inter-centroid distance, largest mean intra-cluster distance)."""
    n = len(report.clusters)
    inter = min(
        (report.centroid_distances[i][j] for i in range(n) for j in range(n) if i != j),
        default=float("inf"),
    )
    intra = max((c.mean_distance or 0.0) for c in report.clusters)
    return inter, intra


def write_outputs(report: ClusterReport, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    with open(os.path.join(out_dir, "features.csv"), "w", newline="") as fh:
        fh.write(features_csv(report))
    write_scatter(report, os.path.join(out_dir, "clusters.svg"))


def features_csv(report: ClusterReport) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    n = len(report.clusters)
    wr.writerow(["id", "label"] + report.header + [f"dist_{j}" for j in range(n)])
    for r in report.records:
        wr.writerow(
            [r["id"], r["label"] or ""]
            + [repr(x) for x in r["features"]]
            + [repr(x) for x in r["centroid_distances"]]
        )
    return buf.getvalue()


def write_scatter(report: ClusterReport, path: str) -> None:
    """Scatter of the two highest-variance feature coordinates."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    X = np.array([r["features"] for r in report.records])
    order = np.argsort(-X.var(axis=0), kind="stable")[:2]
    i, j = int(order[0]), int(order[1])
    labels = [r["label"] or "minimal" for r in report.records]
    names = ["minimal"] + [c.label for c in report.clusters]
    with plt.rc_context({"svg.hashsalt": "whitehead"}):
        fig, ax = plt.subplots(figsize=(6, 5))
        for n, name in enumerate(names):
            pts = X[[lab == name for lab in labels]]
            if len(pts):
                ax.scatter(pts[:, i], pts[:, j], s=6, alpha=0.6, color=f"C{n}", label=name)
        for n, c in enumerate(report.clusters, 1):
            ax.scatter(c.centroid[i], c.centroid[j], marker="X", s=120,
                       color=f"C{n}", edgecolor="black")
        ax.set_xlabel(report.header[i])
        ax.set_ylabel(report.header[j])
        ax.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


# --- genericity ------------------------------------------------------------


def always(w: CyclicWord) -> bool:
    return True


def uniform_neighbourhood(eps: float, m: int, k: int) -> Callable[[CyclicWord], bool]:
    """Predicate: every length-m frequency of w is within eps of uniform."""
    target = 1 / (2 * k * (2 * k - 1) ** (m - 1))
    words = [tuple(v) for v in reduced_words(k, m)]

    def pred(w: CyclicWord) -> bool:
        counts = window_counts(w, m)
        n = len(w)
        return all(abs(counts.get(v, 0) / n - target) <= eps for v in words)

    return pred


@dataclass
class GenericityTable:
    domain: str
    rows: list[tuple[int, int, float]]  # (n, samples, frequency)

    @property
    def frequency(self) -> float:
        return self.rows[-1][2]

    def to_dict(self) -> dict:
        return {
            "domain": self.domain,
            "rows": [{"n": n, "samples": s, "frequency": f} for n, s, f in self.rows],
        }


def estimate_genericity(
    predicate: Callable[[CyclicWord], bool],
    domain: str,
    ns: Sequence[int] | int,
    samples: int,
    rng: np.random.Generator | None = None,
    k: int = 2,
) -> GenericityTable:
    """Empirical frequency of ``predicate`` among random length-n elements.

    ``domain`` is "C" (cyclically reduced words) or "F" (reduced words,
    judged by their cyclic reduction).
    """
    if domain not in ("C", "F"):
        raise ValueError("domain must be 'C' or 'F'")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if isinstance(ns, int):
        ns = [ns]
    rng = make_rng(0) if rng is None else rng
    rows = []
    for n in ns:
        if n < 1:
            raise ValueError("n must be >= 1")
        hits = 0
        for _ in range(samples):
            if domain == "C":
                w = _sample_cyclically_reduced(n, rng, k)[0]
            else:
                w = cyclic_reduce(sample_reduced(n, rng, k))[0]
            hits += bool(predicate(w))
        rows.append((n, samples, hits / samples))
    return GenericityTable(domain, rows)


def strictly_minimal_predicate(k: int) -> Callable[[CyclicWord], bool]:
    return lambda w: is_strictly_minimal(w, k)
