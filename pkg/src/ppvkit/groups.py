"""Differential algebraic subgroups of the additive and multiplicative line.

Subgroups of Ga(k0) are kernels of linear differential operators; subgroups
of Gm(k0) are finite cyclic or pulled back from an operator kernel through
the logarithmic derivative a -> a'/a.  Groups are represented purely by
their defining equations, and containment reduces to right divisibility of
the defining operators: ker L1 is contained in ker L2 exactly when L1
right-divides L2.  The Zariski closure map forgets the differential
structure and lands in {trivial, finite cyclic, full line}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .fieldcore import FieldContext, FieldError, Rat
from .ore import OreOperator, right_divides


class GroupError(FieldError):
    """Descriptor misuse (mixed derivations, unsupported combination, ...)."""


@dataclass(frozen=True)
class GaSubgroup:
    """Full additive line, or the kernel of a monic operator.

    Kernel of the identity operator is the trivial group {0}.
    """

    operator: Optional[OreOperator] = None  # None means the full line

    def __post_init__(self):
        if self.operator is not None:
            if self.operator.is_zero():
                # ker 0 is everything; normalize to the explicit full form
                raise GroupError("use GaSubgroup.full() for the kernel of 0")
            object.__setattr__(self, "operator", self.operator.monic())

    @staticmethod
    def full() -> "GaSubgroup":
        return GaSubgroup(None)

    @staticmethod
    def kernel(op: OreOperator) -> "GaSubgroup":
        return GaSubgroup(op)

    @staticmethod
    def trivial(ctx: FieldContext, deriv: str) -> "GaSubgroup":
        return GaSubgroup(OreOperator.identity(ctx, deriv))

    @property
    def is_full(self) -> bool:
        return self.operator is None

    @property
    def is_trivial(self) -> bool:
        return self.operator is not None and self.operator.order == 0

    def __str__(self) -> str:
        if self.is_full:
            return "Full"
        return f"Ga[L = {self.operator}]"


@dataclass(frozen=True)
class GmSubgroup:
    """Full multiplicative line, finite cyclic mu_n, or an operator condition
    L(a'/a) = 0 on the logarithmic derivative.

    LogKernel with the identity operator is the constant-point group Gm(C);
    FiniteCyclic(1) is trivial.  ``upper_bound_only`` marks descriptors that
    are only known to contain the group being described.
    """

    kind: str  # "full" | "finite_cyclic" | "log_kernel"
    n: Optional[int] = None
    operator: Optional[OreOperator] = None
    upper_bound_only: bool = False

    def __post_init__(self):
        if self.kind == "finite_cyclic":
            if not isinstance(self.n, int) or self.n < 1:
                raise GroupError("finite cyclic order must be a positive integer")
        elif self.kind == "log_kernel":
            if self.operator is None or self.operator.is_zero():
                raise GroupError("log-kernel descriptor needs a nonzero operator")
            object.__setattr__(self, "operator", self.operator.monic())
        elif self.kind != "full":
            raise GroupError(f"unknown multiplicative descriptor kind {self.kind!r}")

    @staticmethod
    def full() -> "GmSubgroup":
        return GmSubgroup("full")

    @staticmethod
    def finite_cyclic(n: int, upper_bound_only: bool = False) -> "GmSubgroup":
        return GmSubgroup("finite_cyclic", n=n, upper_bound_only=upper_bound_only)

    @staticmethod
    def log_kernel(op: OreOperator, upper_bound_only: bool = False) -> "GmSubgroup":
        return GmSubgroup("log_kernel", operator=op, upper_bound_only=upper_bound_only)

    @staticmethod
    def constants(ctx: FieldContext, deriv: str, upper_bound_only: bool = False) -> "GmSubgroup":
        """Gm(C), the multiplicative group of constants."""
        return GmSubgroup.log_kernel(
            OreOperator.identity(ctx, deriv), upper_bound_only=upper_bound_only
        )

    @property
    def is_constants(self) -> bool:
        return self.kind == "log_kernel" and self.operator.order == 0

    def __str__(self) -> str:
        if self.kind == "full":
            return "Full"
        if self.kind == "finite_cyclic":
            return f"mu_n[n = {self.n}]"
        if self.is_constants:
            return "Gm(C)"
        return f"Gm[L(da/a)=0, L = {self.operator}]"


def ga_contains(G: GaSubgroup, H: GaSubgroup) -> bool:
    """True when H is a subgroup of G.

    Kernel containment is right divisibility: ker L1 <= ker L2 iff L1
    right-divides L2.
    """
    if G.is_full:
        return True
    if H.is_full:
        return False
    return right_divides(H.operator, G.operator)


def gm_contains(G: GmSubgroup, H: GmSubgroup) -> bool:
    """True when H is a subgroup of G.

    Finite cyclic groups order by divisibility; torsion consists of
    constants, so mu_n sits inside every log-kernel descriptor; log-kernel
    descriptors order by right divisibility of their operators.
    """
    if G.kind == "full":
        return True
    if H.kind == "full":
        return False
    if H.kind == "finite_cyclic":
        if G.kind == "finite_cyclic":
            return G.n % H.n == 0
        return True  # roots of unity are constants, killed by every L(a'/a)
    # H is a log-kernel
    if G.kind == "finite_cyclic":
        return False  # log-kernels contain the infinite constant group
    return right_divides(H.operator, G.operator)


# -- Zariski closure -----------------------------------------------------------


@dataclass(frozen=True)
class AlgebraicGroupTag:
    """Closure result: TrivialGroup, FiniteCyclic(n), FullGa or FullGm."""

    kind: str  # "trivial" | "finite_cyclic" | "full_ga" | "full_gm"
    n: Optional[int] = None

    def __str__(self) -> str:
        if self.kind == "trivial":
            return "TrivialGroup"
        if self.kind == "finite_cyclic":
            return f"FiniteCyclic({self.n})"
        if self.kind == "full_ga":
            return "FullGa"
        return "FullGm"


def zariski_closure(G: Union[GaSubgroup, GmSubgroup]) -> AlgebraicGroupTag:
    """Smallest algebraic group containing G.

    Any operator kernel of positive order contains an infinite group of
    constant multiples, hence is Zariski dense in the line; only the
    trivial kernel and the finite cyclic groups stay proper.
    """
    if isinstance(G, GaSubgroup):
        if not G.is_full and G.is_trivial:
            return AlgebraicGroupTag("trivial")
        return AlgebraicGroupTag("full_ga")
    if isinstance(G, GmSubgroup):
        if G.kind == "finite_cyclic":
            return AlgebraicGroupTag("finite_cyclic", n=G.n)
        return AlgebraicGroupTag("full_gm")
    raise GroupError(f"not a group descriptor: {G!r}")


def closure_tag_contains(a: AlgebraicGroupTag, b: AlgebraicGroupTag) -> bool:
    """Partial order on closure tags: trivial < finite cyclic < full line."""
    if b.kind == "trivial":
        return True
    if a.kind == "trivial":
        return False
    if a.kind in ("full_ga", "full_gm"):
        return True
    if b.kind in ("full_ga", "full_gm"):
        return False
    return a.n % b.n == 0


# -- logarithmic derivative ------------------------------------------------------


def log_derivative(f: Rat, deriv: str) -> Rat:
    """The homomorphism a -> (da)/a; kernel is the constants of the derivation."""
    if f.is_zero():
        raise FieldError("logarithmic derivative of zero")
    return f.derive(deriv) / f


# -- the subgroup/fixed-field table for Gm under one parametric derivation -------


def gm_del_subgroup_table(
    ctx: FieldContext, deriv: str, n: int = 1
) -> list[tuple[GmSubgroup, str]]:
    """The three-row subgroup table of {a : d(da/a) = 0} with fixed fields.

    Row one is the finite cyclic family (instantiated at the given n), row
    two the constant points Gm(C), row three the whole group; the field
    labels name the corresponding fixed fields of the x^t extension.
    """
    D = OreOperator.d(ctx, deriv)
    return [
        (GmSubgroup.finite_cyclic(n), "k((x^t)^n, log x)"),
        (GmSubgroup.constants(ctx, deriv), "k(log x)"),
        (GmSubgroup.log_kernel(D), "k"),
    ]


def render_group(g: Union[GaSubgroup, GmSubgroup]) -> str:
    return str(g)
