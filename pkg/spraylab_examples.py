#!/usr/bin/env python3
"""
Built-in example registry

Each entry is a plain config dict in the same JSON layout that
spraylab_cli.load_config reads, so `examples --dump NAME` writes a file that
reloads to the same objects. The files under configs/ are dumps of these.
"""

import copy
import json
from typing import Dict, List

from spraylab_errors import InvalidInputError

SO3_STRUCTURE_CONSTANTS = [[1, 2, 3, 1.0], [2, 3, 1, 1.0], [3, 1, 2, 1.0]]

SO3_GENERATORS = [
    [[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]],
    [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
    [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
]

# e_k = -(i/2) sigma_k
SU2_GENERATORS = [
    {"real": [[0.0, 0.0], [0.0, 0.0]], "imag": [[0.0, -0.5], [-0.5, 0.0]]},
    {"real": [[0.0, -0.5], [0.5, 0.0]], "imag": [[0.0, 0.0], [0.0, 0.0]]},
    {"real": [[0.0, 0.0], [0.0, 0.0]], "imag": [[-0.5, 0.0], [0.0, 0.5]]},
]

# f1 = iE11, f2 = E12 - E21, f3 = i(E12 + E21), f4 = iE22
U2_GENERATORS = [
    {"real": [[0.0, 0.0], [0.0, 0.0]], "imag": [[1.0, 0.0], [0.0, 0.0]]},
    {"real": [[0.0, 1.0], [-1.0, 0.0]], "imag": [[0.0, 0.0], [0.0, 0.0]]},
    {"real": [[0.0, 0.0], [0.0, 0.0]], "imag": [[0.0, 1.0], [1.0, 0.0]]},
    {"real": [[0.0, 0.0], [0.0, 0.0]], "imag": [[0.0, 0.0], [0.0, 1.0]]},
]

U2_STRUCTURE_CONSTANTS = [
    [1, 2, 3, 1.0],
    [1, 3, 2, -1.0],
    [2, 3, 1, 2.0],
    [2, 3, 4, -2.0],
    [2, 4, 3, 1.0],
    [3, 4, 2, -1.0],
]

ROUND_SPHERE_CHART = {
    "dim": 2,
    "coefficients": ["-0.5*sin(x1)*cos(x1)*y2^2", "cot(x1)*y1*y2"],
    "map": "sphere_polar",
    "tilt": [0.6, 0.0, 0.0],
}


def _numerics(y0: List[float], t1: float = 2.0, step: float = 1e-3) -> Dict:
    return {
        "step": step,
        "t_span": [0.0, t1],
        "samples": 200,
        "group_samples": 8,
        "seed": 42,
        "restarts": 16,
        "y0": y0,
    }


def _so3(name: str, description: str, h: List[int], m: List[int], base_point, eta: Dict,
         y0: List[float], t1: float = 2.0) -> Dict:
    return {
        "name": name,
        "description": description,
        "algebra": {"dim": 3, "structure_constants": copy.deepcopy(SO3_STRUCTURE_CONSTANTS)},
        "representation": {"size": 3, "generators": copy.deepcopy(SO3_GENERATORS), "base_point": base_point},
        "decomposition": {"h_indices": h, "m_indices": m},
        "eta": eta,
        "numerics": _numerics(y0, t1),
    }


def _sphere(name: str, description: str, eta: Dict, y0=None, t1: float = 2.0) -> Dict:
    return _so3(name, description, [3], [1, 2], [0.0, 0.0, 1.0], eta, y0 or [1.0, 0.0], t1)


def _build_registry() -> Dict[str, Dict]:
    registry = {}

    registry["so3_group"] = _so3(
        "so3_group", "SO(3)/{e} with eta = 0: geodesic orbit, not weakly symmetric",
        [], [1, 2, 3], [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        {"kind": "zero"}, [1.0, 0.5, -0.25])

    registry["so3_sphere_zero_eta"] = _sphere(
        "so3_sphere_zero_eta", "SO(3)/SO(2) with eta = 0: weakly symmetric and geodesic orbit",
        {"kind": "zero"})

    registry["so3_sphere_radial_eta"] = _sphere(
        "so3_sphere_radial_eta", "SO(3)/SO(2) with eta(y) = |y| y: equivariant, not geodesic orbit, not even",
        {"kind": "components", "components": ["norm()*y1", "norm()*y2"]})

    registry["so3_sphere_tangential_eta"] = _sphere(
        "so3_sphere_tangential_eta",
        "SO(3)/SO(2) with eta(y) = |y| [e3, y]: geodesic orbit with witness |y0| e3, not even",
        {"kind": "bracket_form", "coefficients": ["norm()"]})

    registry["su2_group"] = {
        "name": "su2_group",
        "description": "SU(2)/{e} in the realified 2x2 defining representation, eta = 0",
        "algebra": {"dim": 3, "structure_constants": copy.deepcopy(SO3_STRUCTURE_CONSTANTS)},
        "representation": {
            "size": 2,
            "generators": copy.deepcopy(SU2_GENERATORS),
            "base_point": {"real": [[1.0, 0.0], [0.0, 1.0]], "imag": [[0.0, 0.0], [0.0, 0.0]]},
        },
        "decomposition": {"h_indices": [], "m_indices": [1, 2, 3]},
        "eta": {"kind": "zero"},
        "numerics": _numerics([1.0, 0.5, -0.25]),
    }

    chart = _sphere(
        "sphere_chart", "SO(3)/SO(2) with eta = 0 cross-checked against the round-sphere chart spray",
        {"kind": "zero"}, [0.0, 1.0], 1.5707963267948966)
    chart["chart"] = copy.deepcopy(ROUND_SPHERE_CHART)
    registry["sphere_chart"] = chart

    registry["u2_sphere3_nongo"] = {
        "name": "u2_sphere3_nongo",
        "description": "S^3 = U(2)/U(1) with eta(y) = (y2^2 + y3^2, 0, 0): even, equivariant, not geodesic orbit",
        "algebra": {"dim": 4, "structure_constants": copy.deepcopy(U2_STRUCTURE_CONSTANTS)},
        "representation": {
            "size": 2,
            "generators": copy.deepcopy(U2_GENERATORS),
            "base_point": {"real": [1.0, 0.0], "imag": [0.0, 0.0]},
        },
        "decomposition": {"h_indices": [4], "m_indices": [1, 2, 3]},
        "eta": {"kind": "components", "components": ["y2^2 + y3^2", "0", "0"]},
        "numerics": _numerics([0.0, 1.0, 0.0]),
    }

    alias = copy.deepcopy(registry["so3_sphere_zero_eta"])
    alias["name"] = "so3_sphere"
    registry["so3_sphere"] = alias
    return registry


EXAMPLES: Dict[str, Dict] = _build_registry()


def list_examples() -> List[str]:
    return sorted(EXAMPLES)


def get_example(name: str) -> Dict:
    """Deep copy of a registry entry"""
    if name not in EXAMPLES:
        raise InvalidInputError(f"unknown example {name!r}; available: {', '.join(list_examples())}")
    return copy.deepcopy(EXAMPLES[name])


def dump_example(name: str) -> str:
    return json.dumps(get_example(name), indent=2) + "\n"


def main():
    """List the registry"""
    print(f"\n[*] SPRAYLAB EXAMPLES\n{'-' * 70}")
    for name in list_examples():
        print(f"  {name:28s} {EXAMPLES[name]['description']}")


if __name__ == "__main__":
    main()
