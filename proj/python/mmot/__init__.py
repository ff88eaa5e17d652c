"""Multi-marginal optimal transport on finite spaces.

Instances, plans and certificates are plain dicts in the same JSON format the
``mmot`` command line tool reads and writes. Exact values are strings such as
``"1/3"``; float mode returns numbers.
"""

import json

from . import _core
from ._core import MmotError

__all__ = [
    "MmotError",
    "audit",
    "certify",
    "check",
    "gen",
    "instance_hash",
    "solve",
    "solve_dual",
    "suite",
    "tuple",
    "validate",
]


def _dump(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def solve(instance, mode="", grid_cap=1_000_000):
    """Optimal plan, value, potentials and duality gap."""
    return json.loads(_core.solve(_dump(instance), mode, grid_cap))


def solve_dual(instance, mode="", grid_cap=1_000_000):
    return json.loads(_core.solve_dual(_dump(instance), mode, grid_cap))


def check(instance, plan, method="exact", n_max=3, mode=""):
    """Monotonicity verdict for the plan's support."""
    return json.loads(_core.check(_dump(instance), _dump(plan), method, n_max, mode))


def tuple(instance, support, base=None, mode=""):
    """Normalized splitting tuple on the full grid for a monotone support."""
    return json.loads(_core.tuple(_dump(instance), _dump(support), base, mode))


def certify(instance, plan, mode=""):
    return json.loads(_core.certify(_dump(instance), _dump(plan), mode))


def audit(instance, plan, certificate, mode=""):
    return json.loads(_core.audit(_dump(instance), _dump(plan), _dump(certificate), mode))


def gen(dims=2, sizes=(), cost="random", seed=1, mode=""):
    return json.loads(_core.gen(dims, list(sizes), cost, seed, mode))


def suite(count, seed=1, mode="", min_dims=2, max_dims=4, max_size=4, costs=(), point_marginals=False):
    return json.loads(
        _core.suite(count, seed, mode, min_dims, max_dims, max_size, list(costs), point_marginals)
    )


def validate(instance):
    """List of problems with the instance; empty when it is well formed."""
    return _core.validate(_dump(instance))


def instance_hash(instance):
    return _core.instance_hash(_dump(instance))
