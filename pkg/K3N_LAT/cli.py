#!/usr/bin/env python3
"""Command-line front end: subcommand dispatch, JSON reports and DOT."""

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from K3N_LAT import __version__, linalg
from K3N_LAT.chambers import (ChamberComplex, chamber_table, default_base,
                              deformation_types, has_rational_positive_cone,
                              plot_fan, positive_cone_polyhedron,
                              vinberg_domain)
from K3N_LAT.isometry import (Isometry, discriminant_action,
                              extend_isometry, gamma_membership, glue_obstruction,
                              identity, in_monodromy, in_O_plus, is_admissible,
                              is_stable, real_spinor_norm)
from K3N_LAT.lattice import (Lattice, Sublattice,
                             discriminant_group, glue, make_lattice,
                             signature, sublattice)
from K3N_LAT.presets import PRESETS
from K3N_LAT.walls import WALLS_N2, WallSpec, enumerate_walls_in_cone, \
    from_json_cone

SUBCOMMANDS = ("lattice-info", "discriminant", "admissible", "walls-enum",
               "classify", "extend", "monodromy")


@dataclass
class Request:
    """A parsed command line.

    Attributes:
        subcommand: One of SUBCOMMANDS.
        inputs: Lattice spec, preset name, JSON payloads and n.
        flags: signed, bound, dot, csv, plot and budget.
    """
    subcommand: str
    inputs: Dict = field(default_factory=dict)
    flags: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ValueError(f"Unknown subcommand: {self.subcommand}")

    def to_dict(self) -> Dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: Dict) -> "Request":
        return cls(obj["subcommand"], dict(obj.get("inputs", {})),
                   dict(obj.get("flags", {})))

    @classmethod
    def from_json(cls, text: str) -> "Request":
        return cls.from_dict(_load_json(text, "request"))


@dataclass
class Report:
    """Echo of the request with its results.

    Attributes:
        request: The request that produced the results.
        results: Subcommand-specific JSON data.
        certificates: Every "certificate" entry of the results, keyed by
            its dotted path.
        version: Package version.
    """
    request: Request
    results: Dict
    certificates: Dict = field(default_factory=dict)
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps({"request": self.request.to_dict(),
                           "results": self.results,
                           "certificates": self.certificates,
                           "version": self.version},
                          sort_keys=True, indent=2)


def collect_certificates(results, path: str = "") -> Dict:
    """Gather the certificate entries of nested results."""
    found = {}
    if isinstance(results, dict):
        for key in sorted(results):
            sub = f"{path}.{key}" if path else key
            if key == "certificate":
                found[sub] = results[key]
            else:
                found.update(collect_certificates(results[key], sub))
    elif isinstance(results, list):
        for i, item in enumerate(results):
            found.update(collect_certificates(item, f"{path}.{i}"))
    return found


def _load_json(text: str, name: str):
    """Parse a JSON payload.

    Raises:
        SyntaxError: If the payload is not valid JSON, with its position.
    """
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        err = SyntaxError(f"Invalid JSON in {name} at position {e.pos}: "
                          f"{e.msg}")
        err.offset = e.pos
        err.text = text
        raise err


def _matrix(text: str, name: str) -> np.ndarray:
    rows = _load_json(text, name)
    if not isinstance(rows, list) or not all(isinstance(r, list)
                                             for r in rows):
        raise ValueError(f"{name} must be a list of rows")
    return linalg.int_matrix(rows)


def _setting(inputs: Dict) -> Tuple[Lattice, Optional[Sublattice], int,
                                    Dict]:
    """Ambient lattice, sublattice, n and preset entry of the inputs.

    Raises:
        ValueError: If the preset is unknown or no lattice is given.
    """
    preset = {}
    if inputs.get("preset"):
        if inputs["preset"] not in PRESETS:
            raise ValueError(f"Unknown preset: {inputs['preset']}")
        preset = PRESETS[inputs["preset"]]
    spec = inputs.get("lattice") or preset.get("ambient")
    if not spec:
        raise ValueError("No lattice given")
    L = make_lattice(spec)
    M = None
    if inputs.get("sublattice"):
        M = sublattice(L, _matrix(inputs["sublattice"], "sublattice"))
    elif preset:
        M = sublattice(L, preset["basis"])
    n = inputs.get("n") or preset.get("n", 2)
    return L, M, n, preset


def _need(M: Optional[Sublattice]) -> Sublattice:
    if M is None:
        raise ValueError("No sublattice given")
    return M


def _base(inputs: Dict, preset: Dict, M: Sublattice) -> Tuple[int, ...]:
    if inputs.get("base"):
        return tuple(_load_json(inputs["base"], "base"))
    if preset.get("base") is not None:
        return tuple(preset["base"])
    return default_base(M)


def _lattice_info(request: Request) -> Dict:
    L, _, _, _ = _setting(request.inputs)
    A = L.discriminant
    return {"label": L.label,
            "rank": L.rank, "det": L.det, "signature": list(signature(L)),
            "invariant_factors": list(A.invariant_factors),
            "discriminant_order": A.order}


def _discriminant(request: Request) -> Dict:
    L, M, _, _ = _setting(request.inputs)
    A = discriminant_group(M.lattice if M is not None else L)
    return {"invariant_factors": list(A.invariant_factors),
            "generators": [[str(x) for x in g] for g in A.generators],
            "qform": [str(q) for q in A.qform],
            "pairing": [[str(x) for x in row] for row in A.pairing]}


def _admissible(request: Request) -> Dict:
    _, M, n, _ = _setting(request.inputs)
    M = _need(M)
    out = is_admissible(M, n).report()
    out["signature"] = list(signature(M))
    return out


def _walls_enum(request: Request) -> Dict:
    _, M, _, preset = _setting(request.inputs)
    M = _need(M)
    inputs, flags = request.inputs, request.flags
    spec = WallSpec.parse(inputs["norms"]) if inputs.get("norms") \
        else WALLS_N2
    base = _base(inputs, preset, M)
    if inputs.get("cone"):
        cone = from_json_cone(M, _load_json(inputs["cone"], "cone"), base)
    elif has_rational_positive_cone(M):
        cone = positive_cone_polyhedron(M, base).cone(base)
    else:
        cone = vinberg_domain(M, base=base, budget=flags.get("budget")) \
            .cone(base)
    result = enumerate_walls_in_cone(M, cone, spec,
                                     signed=bool(flags.get("signed")),
                                     bound=flags.get("bound"))
    out = result.report(M)
    out["cone"] = [list(r) for r in cone.rays]
    return out


def emit_dot(complex: ChamberComplex) -> str:
    """Adjacency graph in DOT: one node per chamber, edges labeled by the
    separating wall."""
    lines = ["graph chambers {"]
    for i, c in enumerate(complex.chambers):
        lines.append(f'  K{i} [label="K{i}"];')
    for i, j, w in complex.adjacency:
        wall = ", ".join(str(x) for x in complex.walls[w])
        lines.append(f'  K{i} -- K{j} [label="({wall})"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _classify(request: Request) -> Dict:
    _, M, n, preset = _setting(request.inputs)
    M = _need(M)
    inputs, flags = request.inputs, request.flags
    spec = WallSpec.parse(inputs["norms"]) if inputs.get("norms") \
        else WALLS_N2
    result = deformation_types(M, n, spec, _base(inputs, preset, M),
                               preset.get("candidates", ()),
                               flags.get("budget"),
                               verbose=bool(flags.get("verbose")))
    if flags.get("csv"):
        chamber_table(result.complex).to_csv(flags["csv"], sep=";",
                                             index=False)
    if flags.get("plot"):
        plot_fan(result.complex, flags["plot"])
    out = result.report()
    if flags.get("dot"):
        out["dot"] = emit_dot(result.complex)
    return out


def _psi_attempt(label: str, phi: Isometry, psi: Isometry, data, n: int
                 ) -> Dict:
    obstruction = glue_obstruction(phi, psi, data)
    ext = extend_isometry(phi, psi, data) if obstruction is None else None
    return {"psi": label,
            "extension": ext.tolist() if ext is not None else None,
            "obstruction": list(obstruction) if obstruction is not None
            else None,
            "in_monodromy": in_monodromy(ext, n) if ext is not None
            else None}


def _extend(request: Request) -> Dict:
    _, M, n, preset = _setting(request.inputs)
    M = _need(M)
    inputs = request.inputs
    data = glue(M)
    if inputs.get("phi"):
        phi = _matrix(inputs["phi"], "phi")
    elif preset.get("phi") is not None:
        phi = linalg.int_matrix(preset["phi"])
    else:
        raise ValueError("No isometry phi given")
    phi = Isometry(phi, data.S.lattice)
    K_lat = data.K.lattice
    if inputs.get("psi"):
        attempts = [_psi_attempt("input", phi,
                                 Isometry(_matrix(inputs["psi"], "psi"),
                                          K_lat), data, n)]
    else:
        attempts = [_psi_attempt("id", phi, identity(K_lat), data, n),
                    _psi_attempt("-id", phi, -identity(K_lat), data, n)]
    verdict = gamma_membership(phi, M, n, preset.get("candidates", ()), data)
    return {"attempts": attempts,
            "gamma": {"verdict": verdict.verdict,
                      "generic_verdict": verdict.generic_verdict,
                      "certificate": verdict.certificate}}


def _monodromy(request: Request) -> Dict:
    L, _, n, _ = _setting(request.inputs)
    if not request.inputs.get("matrix"):
        raise ValueError("No matrix given")
    sigma = Isometry(_matrix(request.inputs["matrix"], "matrix"), L)
    member = in_monodromy(sigma, n)
    return {"stable": is_stable(sigma),
            "spinor_norm": real_spinor_norm(sigma),
            "in_O_plus": in_O_plus(sigma),
            "discriminant_action": [[int(x) for x in row] for row in
                                    discriminant_action(sigma).matrix],
            "in_monodromy": member,
            "verdict": "member" if member else "non_member"}


_HANDLERS = {
    "lattice-info": _lattice_info,
    "discriminant": _discriminant,
    "admissible": _admissible,
    "walls-enum": _walls_enum,
    "classify": _classify,
    "extend": _extend,
    "monodromy": _monodromy,
}


def run(request: Request) -> Report:
    """Dispatch a request to the library.

    Raises:
        ValueError: On domain errors.
        SyntaxError: On lattice spec or JSON parse errors.
    """
    results = _HANDLERS[request.subcommand](request)
    return Report(request, results, collect_certificates(results))


def _parser() -> argparse.ArgumentParser:
    cli = argparse.ArgumentParser(prog="k3n-lat")
    sub = cli.add_subparsers(dest="subcommand", required=True)

    info = sub.add_parser("lattice-info", help="Rank, signature, det")
    info.add_argument("lattice", type=str, help="Lattice spec, e.g. 'L2'")
    disc = sub.add_parser("discriminant", help="Discriminant form")
    disc.add_argument("lattice", type=str, help="Lattice spec")
    disc.add_argument("--sublattice", type=str,
                      help="JSON basis rows, the group of M when given")

    for name, text in (("admissible", "Admissibility of M"),
                       ("walls-enum", "Wall classes meeting a cone"),
                       ("classify", "Chambers and deformation types"),
                       ("extend", "Extend phi + psi to the ambient lattice"),
                       ("monodromy", "Monodromy membership")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--lattice", type=str, help="Ambient lattice spec")
        p.add_argument("--preset", type=str, choices=sorted(PRESETS),
                       help="Worked-example sublattice")
        p.add_argument("--n", type=int, help="K3^[n] parameter")
        if name != "monodromy":
            p.add_argument("--sublattice", type=str, help="JSON basis rows")
        if name in ("walls-enum", "classify"):
            p.add_argument("--norms", "--walls-spec", dest="norms", type=str,
                           help="Wall norms, e.g. '-2,-10:div2'")
            p.add_argument("--base", type=str, help="JSON base point of M")
            p.add_argument("--budget", type=int,
                           help="Vinberg budget, overrides the environment")
        if name == "walls-enum":
            p.add_argument("--cone", type=str, help="JSON rays of the cone")
            p.add_argument("--signed", action="store_true",
                           help="Keep signed classes")
            p.add_argument("--bound", type=int, help="User search bound")
        if name == "classify":
            p.add_argument("--dot", action="store_true",
                           help="Print the adjacency graph in DOT")
            p.add_argument("--csv", type=str, help="Chamber table output")
            p.add_argument("--plot", type=str, help="Fan plot output (PNG)")
            p.add_argument("--verbose", action="store_true")
        if name == "extend":
            p.add_argument("--phi", type=str, help="JSON isometry of M")
            p.add_argument("--psi", type=str,
                           help="JSON isometry of M-perp, +-id when omitted")
        if name == "monodromy":
            p.add_argument("--matrix", type=str, help="JSON isometry")
    return cli


_FLAGS = ("signed", "bound", "dot", "csv", "plot", "budget", "verbose")
# Options whose values start with '-'
_DASHED = ("--norms", "--walls-spec")


def _attach_dashed(argv: Sequence[str]) -> List[str]:
    """Write '--norms -2,-10' as '--norms=-2,-10' so argparse keeps it."""
    out = []
    it = iter(argv)
    for arg in it:
        if arg in _DASHED:
            value = next(it, None)
            out.append(arg if value is None else f"{arg}={value}")
        else:
            out.append(arg)
    return out


def request_from_args(argv: Optional[Sequence[str]] = None) -> Request:
    argv = sys.argv[1:] if argv is None else argv
    args = vars(_parser().parse_args(_attach_dashed(argv)))
    subcommand = args.pop("subcommand")
    flags = {k: args.pop(k) for k in _FLAGS if k in args}
    inputs = {k: v for k, v in args.items() if v is not None}
    flags = {k: v for k, v in flags.items() if v not in (None, False)}
    return Request(subcommand, inputs, flags)


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and print its report.

    Returns:
        0 on success, 1 on domain errors, 2 on parse errors.
    """
    try:
        request = request_from_args(argv)
        report = run(request)
    except SyntaxError as e:
        print(json.dumps({"error": {"type": "SyntaxError",
                                    "message": str(e.msg)}},
                         sort_keys=True, indent=2))
        return 2
    except ValueError as e:
        print(json.dumps({"error": {"type": "ValueError",
                                    "message": str(e)}},
                         sort_keys=True, indent=2))
        return 1
    if request.flags.get("dot"):
        sys.stdout.write(report.results["dot"])
    else:
        print(report.to_json())
    return 0


if __name__ == "__main__":
    sys.exit(main())
