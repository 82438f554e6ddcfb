"""Scenario files: a small JSON schema driving reproducible runs.

A scenario names one computation (``kind``), the operators it acts on,
and where results go.  Hamiltonians are written as coefficient + Pauli
word + 1-based qubit indices (``"0.5 ZZ 1 2"``) or exchange couplings
(``"1.0 s12"``); coefficients are angular frequencies in rad/s.
NMR-style inputs use the explicit ``nmr`` block instead, whose ``nu``
and ``j`` fields are in Hz with the conventional pi factors applied
internally -- the two spellings are kept separate so no 2 pi ambiguity
can creep in.

Example::

    {"kind": "project", "n_qubits": 1,
     "hamiltonian": {"terms": ["1.0 Z 1"]},
     "sequence": {"name": "cp_x"},
     "seed": 0}

Parsed scenarios round-trip unchanged through ``to_dict``/``from_dict``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .codes import CODE_NAMES, build_code, nmr_hamiltonian, weak_coupling_truncation
from .config import ValidationError
from .decoupling import SEQUENCE_NAMES, DecouplingScheme, named_sequence
from .operators import Operator, PauliString, expm, pauli_sum

__all__ = ["Scenario", "parse_term", "parse_hamiltonian", "KINDS"]

KINDS = ("average", "project", "propagate", "logical", "universality", "noise", "scan")

_FUSED = re.compile(r"^([A-Za-z]+?)(\d+)$")


def parse_term(text: str, n_qubits: int) -> PauliString | list[PauliString]:
    """Parse one Hamiltonian term.

    Accepted forms: ``"0.5 ZZ 1 2"``, ``"Z 1"``, ``"Z1"``, ``"-2 X1"``,
    and exchange couplings ``"1.0 s 1 2"`` / ``"s12"`` (which expand to
    the three Pauli products).
    """
    tokens = text.split()
    if not tokens:
        raise ValidationError("empty Hamiltonian term")
    coeff = 1.0
    try:
        coeff = float(tokens[0])
        tokens = tokens[1:]
    except ValueError:
        pass
    if not tokens:
        raise ValidationError(f"term {text!r} has no operator part")

    head, *rest = tokens
    fused = _FUSED.match(head)
    if fused:
        head, digits = fused.group(1), fused.group(2)
        rest = list(digits) + rest

    if head.lower() == "s":
        if len(rest) != 2:
            raise ValidationError(f"exchange term {text!r} needs two qubit indices")
        j, k = (int(r) for r in rest)
        return [
            PauliString.from_word(a + a, [j, k], n_qubits, coefficient=coeff) for a in "XYZ"
        ]
    word = head.upper()
    if set(word) - set("IXYZ"):
        raise ValidationError(f"unknown operator {head!r} in term {text!r}")
    if len(rest) != len(word):
        raise ValidationError(f"term {text!r}: word {word!r} needs {len(word)} qubit indices")
    return PauliString.from_word(word, [int(r) for r in rest], n_qubits, coefficient=coeff)


def parse_hamiltonian(spec: Mapping[str, Any], n_qubits: int) -> Operator:
    """Build the operator described by a scenario ``hamiltonian`` block."""
    if "nmr" in spec:
        block = spec["nmr"]
        nu = block.get("nu")
        if nu is None:
            raise ValidationError("nmr block needs chemical shifts 'nu'")
        terms = nmr_hamiltonian(nu, block.get("j", {}), n=len(nu))
        if block.get("weak_coupling", False):
            species = block.get("species")
            if species is None:
                raise ValidationError("weak_coupling truncation needs per-qubit 'species' labels")
            terms = weak_coupling_truncation(terms, species)
        return pauli_sum(terms, n=len(nu))
    term_strings = spec.get("terms")
    if term_strings is None:
        raise ValidationError("hamiltonian block needs 'terms' or 'nmr'")
    terms: list[PauliString] = []
    for t in term_strings:
        parsed = parse_term(t, n_qubits)
        terms.extend(parsed if isinstance(parsed, list) else [parsed])
    return pauli_sum(terms, n=n_qubits)


@dataclass(frozen=True)
class Scenario:
    """One validated scenario file."""

    kind: str
    n_qubits: int = 1
    hamiltonian: Mapping[str, Any] | None = None
    code: str | None = None
    sequence: Mapping[str, Any] | None = None
    cycle_time: float = 1.0
    sweep: Sequence[float] | None = None
    generators: Sequence[Sequence[str]] | None = None
    target: str | None = None
    noise: Mapping[str, Any] | None = None
    seed: int = 0
    output: Mapping[str, Any] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown scenario kind {self.kind!r}; known: {', '.join(KINDS)}")
        if self.code is not None and self.code not in CODE_NAMES:
            raise ValidationError(f"unknown code {self.code!r}")
        if self.output is not None:
            unknown = set(self.output) - {"path", "format"}
            if unknown:
                raise ValidationError(f"unknown output fields: {sorted(unknown)}")
        if self.output_format not in ("json", "csv"):
            raise ValidationError(f"unknown output format {self.output_format!r}")

    @property
    def output_format(self) -> str:
        if self.output and "format" in self.output:
            return str(self.output["format"])
        return "json"

    @property
    def output_path(self) -> str | None:
        if self.output and "path" in self.output:
            return str(self.output["path"])
        return None

    # -- serialization ---------------------------------------------------
    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Scenario":
        known = {
            "kind", "n_qubits", "hamiltonian", "code", "sequence", "cycle_time",
            "sweep", "generators", "target", "noise", "seed", "output",
        }
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown scenario fields: {sorted(unknown)}")
        if "kind" not in d:
            raise ValidationError("scenario needs a 'kind'")
        return cls(**{k: d[k] for k in d})

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, "n_qubits": self.n_qubits, "seed": self.seed,
                               "cycle_time": self.cycle_time}
        for key in ("hamiltonian", "code", "sequence", "sweep", "generators", "target",
                    "noise", "output"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"scenario file is not valid JSON: {exc}") from exc
        if not isinstance(d, dict):
            raise ValidationError("scenario file must hold a JSON object")
        return cls.from_dict(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    # -- resolution ------------------------------------------------------
    def resolve_hamiltonian(self) -> Operator:
        if self.hamiltonian is None:
            raise ValidationError(f"kind {self.kind!r} needs a hamiltonian block")
        return parse_hamiltonian(self.hamiltonian, self.n_qubits)

    def resolve_sequence(self) -> DecouplingScheme:
        if self.sequence is None:
            raise ValidationError(f"kind {self.kind!r} needs a sequence")
        spec = self.sequence
        if isinstance(spec, str):
            spec = {"name": spec}
        if "name" in spec:
            name = spec["name"]
            if name not in SEQUENCE_NAMES:
                raise ValidationError(f"unknown sequence {name!r}")
            # A sequence is encoded iff a code is named: either in the
            # sequence block itself or, for the sequences that cannot
            # exist unencoded, at the scenario level.
            needs_code = name in ("s1_selective_x1", "s1_selective_x2", "zz_extractor")
            code_name = spec.get("code") or (self.code if needs_code else None)
            if needs_code and code_name is None:
                raise ValidationError(f"sequence {name!r} needs a code")
            code = build_code(code_name) if code_name else None
            return named_sequence(
                name,
                n_qubits=self.n_qubits,
                code=code,
                cycle_time=float(spec.get("cycle_time", self.cycle_time)),
                physical=bool(spec.get("physical", False)),
            )
        if "pulses" in spec:
            pulses = []
            for p in spec["pulses"]:
                terms: list[PauliString] = []
                for t in p.get("terms", []):
                    parsed = parse_term(t, self.n_qubits)
                    terms.extend(parsed if isinstance(parsed, list) else [parsed])
                generator = pauli_sum(terms, n=self.n_qubits)
                pulses.append(expm(generator, float(p.get("angle", np.pi / 2))))
            durations = tuple(float(x) for x in spec["durations"])
            return DecouplingScheme(
                tuple(pulses), durations, float(spec.get("cycle_time", self.cycle_time)),
                label="explicit",
            )
        raise ValidationError("sequence block needs a 'name' or explicit 'pulses'")
