"""Analysis reports, symbolic-vs-oracle verification, and the built-in corpus."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import oracle
from .dsl import CircuitDocument, Measure, Pair, parse_circuit
from .qie import (
    CNOT,
    H,
    X,
    Z,
    Basis,
    QieSystem,
    RepresentabilityError,
    UnsupportedGateError,
    derive_from_circuit,
    parse_qie_text,
)
from .reasoner import (
    ContradictionError,
    CorrelationVerdict,
    MeasurementSpec,
    MissingOutcomeError,
    PairReport,
    VerdictKind,
    all_basis_uncorrelated,
    correlation_table,
    dual_system,
    equivalence_classes,
    measure,
    pair_correlation,
    pair_report,
    preserved_against,
    qil_entangled,
)

SCHEMA = 1
PROB_TOL = 1e-9
FIDELITY_TOL = 1e-10


def _classes_text(classes) -> str:
    return " ".join("{" + ",".join(str(q + 1) for q in cls) + "}" for cls in classes)


def _derive(doc: CircuitDocument) -> Tuple[Optional[QieSystem], Optional[str]]:
    try:
        return derive_from_circuit(doc.gates, doc.n, doc.init), None
    except (RepresentabilityError, UnsupportedGateError) as exc:
        return None, str(exc)


# -- analyze -----------------------------------------------------------------


@dataclass
class AnalyzeReport:
    n: int
    system: Optional[QieSystem]
    error: Optional[str] = None
    table: List[PairReport] = field(default_factory=list)
    classes: List[Tuple[int, ...]] = field(default_factory=list)
    script: List[dict] = field(default_factory=list)
    script_error: Optional[str] = None

    @property
    def exit_code(self) -> int:
        return 2 if self.error or self.script_error else 0

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": "analyze",
            "n": self.n,
            "representable": self.system is not None,
            "error": self.error,
            "qie": self.system.to_text() if self.system else None,
            "classes": [[q + 1 for q in cls] for cls in self.classes],
            "table": [r.to_json() for r in self.table],
            "script": self.script,
            "script_error": self.script_error,
        }

    def render(self) -> str:
        if self.system is None:
            return f"not representable: {self.error}\n"
        lines = [f"QIE   {self.system.to_text()}", f"classes   {_classes_text(self.classes)}"]
        if self.table:
            lines.append("")
            lines.append(f"{'pair':<8}{'c':<22}{'h':<22}{'all-basis':<11}entangled")
            for r in self.table:
                lines.append(
                    f"{r.pair[0] + 1}-{r.pair[1] + 1:<6}{r.c.short():<22}{r.h.short():<22}"
                    f"{str(r.all_basis_uncorrelated).lower():<11}{str(r.qil_entangled).lower()}"
                )
        for step in self.script:
            if "measure" in step:
                how = "forced" if step["forced"] else "free"
                lines.append(
                    f"measure {step['measure']} {step['basis']} -> {step['outcome']} ({how})   {step['qie']}"
                )
            else:
                p = step["report"]
                lines.append(
                    f"pair {p['pair'][0]}-{p['pair'][1]}   c: {step['c']}   h: {step['h']}"
                    f"   all-basis: {str(p['all_basis_uncorrelated']).lower()}"
                    f"   entangled: {str(p['qil_entangled']).lower()}"
                )
        if self.script_error:
            lines.append(f"script error: {self.script_error}")
        return "\n".join(lines) + "\n"


def run_analyze(doc: CircuitDocument) -> AnalyzeReport:
    sys, error = _derive(doc)
    if sys is None:
        return AnalyzeReport(doc.n, None, error)
    report = AnalyzeReport(doc.n, sys, table=correlation_table(sys), classes=equivalence_classes(sys))
    cur = sys
    for d in doc.directives:
        if isinstance(d, Measure):
            try:
                cur, outcome, forced = measure(cur, MeasurementSpec(d.qubit, d.basis, d.outcome))
            except (MissingOutcomeError, ContradictionError) as exc:
                report.script_error = str(exc)
                break
            report.script.append(
                {"measure": d.qubit + 1, "basis": d.basis.value, "outcome": outcome, "forced": forced, "qie": cur.to_text()}
            )
        else:
            r = pair_report(cur, d.i, d.j)
            report.script.append({"pair": [d.i + 1, d.j + 1], "c": r.c.short(), "h": r.h.short(), "report": r.to_json()})
    return report


# -- verify ------------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerifyReport:
    checks: List[Check] = field(default_factory=list)
    coverage: str = "representable"

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": "verify",
            "ok": self.ok,
            "coverage": self.coverage,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }

    def render(self) -> str:
        lines = [f"symbolic coverage: {self.coverage}"]
        for c in self.checks:
            lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}" + (f"  ({c.detail})" if c.detail else ""))
        lines.append("all checks passed" if self.ok else f"{len(self.failures)} check(s) failed")
        return "\n".join(lines) + "\n"


def _solutions(sys: QieSystem, basis: Basis) -> List[int]:
    rows = sys.rows(basis)
    out = []
    for x in range(2 ** sys.n):
        if all(bin(x & m).count("1") % 2 == r for m, r in rows):
            out.append(x)
    return out


def _joint(state: oracle.StateVector, qubits: List[int], basis: Basis) -> np.ndarray:
    """Joint outcome distribution of ``qubits`` (axes in the given order) in one basis."""
    st = oracle.hadamard_all(state) if basis is Basis.H else state
    probs = st.probabilities().reshape([2] * state.n)
    rest = tuple(q for q in range(state.n) if q not in qubits)
    kept = sorted(qubits)
    return np.transpose(probs.sum(axis=rest), [kept.index(q) for q in qubits])


def check_verdict(state: oracle.StateVector, v: CorrelationVerdict) -> Tuple[bool, str]:
    """Numerical counterpart of one same-basis verdict."""
    (i, j), basis = v.pair, v.bases[0]
    joint = _joint(state, [i, j], basis)
    if v.kind is VerdictKind.PERFECT:
        p = joint[0, v.rhs ^ 0] + joint[1, v.rhs ^ 1]
        return abs(p - 1) < PROB_TOL, f"p(parity={v.rhs}) = {p:.12f}"
    indep = float(np.abs(joint - np.outer(joint.sum(1), joint.sum(0))).max())
    if indep >= PROB_TOL:
        return False, f"marginal dependence {indep:.3g}"
    if v.kind is VerdictKind.CONDITIONAL:
        cond = [c.qubit for c in v.conditioning]
        probs = _joint(state, cond + [i, j], basis).reshape(2 ** len(cond), 2, 2)
        for branch in probs:
            total = branch.sum()
            if total <= 1e-12:
                continue
            par = (branch[0, 1] + branch[1, 0]) / total
            if min(par, 1 - par) >= PROB_TOL:
                return False, f"parity not fixed after conditioning (p={par:.6f})"
    return True, ""


def verify_system(
    report: VerifyReport,
    sys: QieSystem,
    state: oracle.StateVector,
    trials: int,
    seed: int,
    label: str = "",
    pairs: Optional[List[Tuple[int, int]]] = None,
) -> None:
    tag = f"{label}: " if label else ""
    try:
        sys.check_invariants()
        report.add(f"{tag}invariants", True)
    except AssertionError as exc:
        report.add(f"{tag}invariants", False, str(exc))
    total = sys.rank(Basis.C) + sys.rank(Basis.H)
    report.add(f"{tag}rank c+h = n", total == sys.n, f"{total} vs {sys.n}")
    for basis in Basis:
        bad = []
        for eq in sys.eqs(basis):
            p0, p1 = oracle.parity_distribution(state, eq.members, basis)
            if (p1 if eq.rhs else p0) < 1 - PROB_TOL:
                bad.append(str(eq))
        report.add(f"{tag}{basis}-parity soundness", not bad, ", ".join(bad))
        if total == sys.n:
            same = _solutions(sys, basis) == oracle.support_masks(state, basis)
            report.add(f"{tag}{basis}-support completeness", same)
    if pairs is None:
        pairs = list(itertools.combinations(range(sys.n), 2))
    for i, j in pairs:
        name = f"{tag}pair {i + 1}-{j + 1}"
        for basis in Basis:
            v = pair_correlation(sys, i, j, basis)
            ok, detail = check_verdict(state, v)
            report.add(f"{name} {basis} {v.short()}", ok, detail)
        if all_basis_uncorrelated(sys, i, j):
            ok = oracle.random_basis_independence(state, i, j, trials, seed)
            report.add(f"{name} all-basis: random bases ({trials} trials)", ok)
            report.add(f"{name} all-basis: product marginal", oracle.product_marginal_check(state, i, j, PROB_TOL))
        if sys.n - 2 <= 6:
            sym = qil_entangled(sys, i, j)
            num = oracle.localizable_entanglement_search(state, i, j)
            report.add(f"{name} entangled={str(sym).lower()}", sym == num, f"localizable search: {num}")


def run_verify(doc: CircuitDocument, trials: int = 100, seed: int = 0) -> VerifyReport:
    report = VerifyReport()
    state = oracle.simulate(doc.gates, doc.n, doc.init)
    report.add("oracle norm", abs(np.vdot(state.amps, state.amps).real - 1) < 1e-12)
    sys, error = _derive(doc)
    if sys is None:
        report.coverage = f"not representable ({error})"
        return report
    verify_system(report, sys, state, trials, seed)
    for step, d in enumerate(doc.directives, start=1):
        if isinstance(d, Pair):
            pairs = [tuple(sorted((d.i, d.j)))]
            verify_system(report, sys, state, trials, seed, label=f"step {step}", pairs=pairs)
            continue
        label = f"step {step} measure {d.qubit + 1} {d.basis}"
        try:
            sys, outcome, forced = measure(sys, MeasurementSpec(d.qubit, d.basis, d.outcome))
        except (MissingOutcomeError, ContradictionError) as exc:
            report.add(label, False, str(exc))
            return report
        p = oracle.outcome_probability(state, d.qubit, d.basis, outcome)
        numeric_forced = p > 1 - PROB_TOL or p < PROB_TOL
        report.add(f"{label} forced={str(forced).lower()}", forced == numeric_forced, f"p(outcome={outcome}) = {p:.12f}")
        if forced:
            report.add(f"{label} forced value", p > 1 - PROB_TOL)
        state, _ = oracle.measure_in_basis(state, d.qubit, d.basis, outcome)
        verify_system(report, sys, state, trials, seed, label=label, pairs=[])
    return report


def random_circuit(rng: np.random.Generator, n: int, n_gates: int) -> CircuitDocument:
    """Random H/X/Z/CNOT circuit on a random computational basis state."""
    gates = []
    for _ in range(n_gates):
        kind = rng.integers(4) if n > 1 else rng.integers(3)
        q = int(rng.integers(n))
        if kind == 0:
            gates.append(H(q))
        elif kind == 1:
            gates.append(X(q))
        elif kind == 2:
            gates.append(Z(q))
        else:
            c, t = (int(v) for v in rng.choice(n, size=2, replace=False))
            gates.append(CNOT(c, t))
    init = tuple(int(b) for b in rng.integers(2, size=n))
    return CircuitDocument(n, init, gates)


def random_measurements(rng: np.random.Generator, doc: CircuitDocument, count: int) -> List[Measure]:
    """Measurements on distinct qubits with outcomes drawn from the oracle's branch probabilities."""
    state = oracle.simulate(doc.gates, doc.n, doc.init)
    script = []
    for q in rng.permutation(doc.n)[:count]:
        q = int(q)
        basis = (Basis.C, Basis.H)[int(rng.integers(2))]
        p0 = oracle.outcome_probability(state, q, basis, 0)
        outcome = int(rng.random() >= p0)
        state, _ = oracle.measure_in_basis(state, q, basis, outcome)
        script.append(Measure(q, basis, outcome))
    return script


# -- duality ---------------------------------------------------------------------


@dataclass
class DualityReport:
    dual: bool
    symbolic: Optional[bool]
    fidelity: Optional[float]
    reason: str = ""

    @property
    def consistent(self) -> bool:
        if self.symbolic is None or self.fidelity is None:
            return True
        return self.symbolic == (self.fidelity > 1 - FIDELITY_TOL)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": "duality",
            "dual": self.dual,
            "symbolic": self.symbolic,
            "oracle_fidelity": self.fidelity,
            "consistent": self.consistent,
            "reason": self.reason,
        }

    def render(self) -> str:
        out = f"dual: {str(self.dual).lower()}"
        if self.fidelity is not None:
            out += f"   oracle fidelity of H^n A with B: {self.fidelity:.12f}"
        if self.reason:
            out += f"   ({self.reason})"
        return out + "\n"


def run_duality(doc_a: CircuitDocument, doc_b: CircuitDocument) -> DualityReport:
    if doc_a.n != doc_b.n:
        return DualityReport(False, False, None, "different qubit counts")
    state_a = oracle.simulate(doc_a.gates, doc_a.n, doc_a.init)
    state_b = oracle.simulate(doc_b.gates, doc_b.n, doc_b.init)
    fid = oracle.hadamard_all(state_a).fidelity(state_b)
    sys_a, err_a = _derive(doc_a)
    sys_b, err_b = _derive(doc_b)
    if sys_a is None or sys_b is None:
        return DualityReport(fid > 1 - FIDELITY_TOL, None, fid, f"oracle only: {err_a or err_b}")
    sym = dual_system(sys_a).same_equations(sys_b)
    return DualityReport(sym, sym, fid)


# -- corpus ---------------------------------------------------------------------


@dataclass(frozen=True)
class Fixture:
    query: str
    expected: str
    citation: str


@dataclass
class Scenario:
    name: str
    circuit: CircuitDocument
    expected: List[Fixture]
    state_text: str


def _read(name: str) -> str:
    return resources.files("qil").joinpath("corpus", name).read_text(encoding="utf-8")


def _parse_fixtures(text: str) -> List[Fixture]:
    out = []
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        body, _, citation = line.partition(" ## ")
        query, sep, expected = body.partition(" => ")
        if not sep or not citation.strip():
            raise ValueError(f"malformed fixture line {line!r}")
        out.append(Fixture(query.strip(), expected.strip(), citation.strip()))
    return out


CORPUS_NAMES = ("bell", "ghz", "psi3", "psi3L", "psi4")


def load_corpus() -> Dict[str, Scenario]:
    return {
        name: Scenario(
            name,
            parse_circuit(_read(f"{name}.qil")),
            _parse_fixtures(_read(f"{name}.expect")),
            _read(f"{name}.state"),
        )
        for name in sorted(CORPUS_NAMES)
    }


def evaluate_query(sys: QieSystem, query: str, corpus: Optional[Dict[str, Scenario]] = None) -> str:
    """Evaluate a fixture query such as ``measure 3 h 0 / pair 1 2 h``."""
    *steps, final = [s.strip() for s in query.split(" / ")]
    for step in steps:
        kw, q, b, *rest = step.split()
        if kw != "measure":
            raise ValueError(f"only measure steps may precede the query, got {step!r}")
        sys, _, _ = measure(sys, MeasurementSpec(int(q) - 1, Basis(b), int(rest[0]) if rest else None))
    kw, *args = final.split()
    if kw == "qie":
        return sys.to_text()
    if kw == "classes":
        return _classes_text(equivalence_classes(sys))
    if kw == "pair":
        return pair_correlation(sys, int(args[0]) - 1, int(args[1]) - 1, Basis(args[2])).short()
    if kw == "all_basis":
        return str(all_basis_uncorrelated(sys, int(args[0]) - 1, int(args[1]) - 1)).lower()
    if kw == "entangled":
        return str(qil_entangled(sys, int(args[0]) - 1, int(args[1]) - 1)).lower()
    if kw == "preserved":
        return str(preserved_against(sys, int(args[0]) - 1, int(args[1]) - 1, Basis(args[2]))).lower()
    if kw == "status":
        return str(sys.status_of(int(args[0]) - 1, Basis(args[1])))
    if kw == "dual":
        other = (corpus or load_corpus())[args[0]]
        sys_b = derive_from_circuit(other.circuit.gates, other.circuit.n, other.circuit.init)
        return str(dual_system(sys).same_equations(sys_b)).lower()
    raise ValueError(f"unknown query {final!r}")


def fixture_matches(query: str, actual: str, expected: str, n: int) -> bool:
    if query.split(" / ")[-1].strip() == "qie":
        return parse_qie_text(actual, n).same_equations(parse_qie_text(expected, n))
    return actual == expected


@dataclass
class CorpusReport:
    results: List[Tuple[str, Check]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for _, c in self.results)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": "corpus",
            "ok": self.ok,
            "results": [{"scenario": s, "name": c.name, "passed": c.passed, "detail": c.detail} for s, c in self.results],
        }

    def render(self) -> str:
        lines = [f"[{'PASS' if c.passed else 'FAIL'}] {s}: {c.name}" + (f"  ({c.detail})" if c.detail else "")
                 for s, c in self.results]
        passed = sum(c.passed for _, c in self.results)
        lines.append(f"{passed}/{len(self.results)} corpus checks passed")
        return "\n".join(lines) + "\n"


def run_scenario(sc: Scenario, corpus: Dict[str, Scenario], trials: int = 100, seed: int = 0) -> List[Check]:
    checks = []
    doc = sc.circuit
    sys = derive_from_circuit(doc.gates, doc.n, doc.init)
    for fx in sc.expected:
        actual = evaluate_query(sys, fx.query, corpus)
        ok = fixture_matches(fx.query, actual, fx.expected, doc.n)
        checks.append(Check(f"{fx.query} => {fx.expected}", ok, "" if ok else f"got {actual}; {fx.citation}"))
    golden = oracle.StateVector.from_text(doc.n, sc.state_text)
    fid = oracle.simulate(doc.gates, doc.n, doc.init).fidelity(golden)
    checks.append(Check("golden state", fid > 1 - FIDELITY_TOL, f"fidelity {fid:.12f}"))
    ver = run_verify(doc, trials, seed)
    checks.append(Check("verify", ver.ok, "; ".join(c.name for c in ver.failures)))
    return checks


def run_corpus(trials: int = 100, seed: int = 0) -> CorpusReport:
    corpus = load_corpus()
    report = CorpusReport()
    for name, sc in sorted(corpus.items()):
        for check in run_scenario(sc, corpus, trials, seed):
            report.results.append((name, check))
    return report
