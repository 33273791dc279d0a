"""
Invariant Service
Fricke and Siegel-Ramachandra invariants of ray classes, the Weber
differences xi_t and the numerical fixing group of h(1/N)
"""

from fractions import Fraction
from multiprocessing import Pool
from typing import Dict, List, Optional, Tuple
import math

import mpmath

from src.config.constants import EXCEPTIONAL_DISCRIMINANTS
from src.models.field import Field
from src.models.ideal import Ideal
from src.models.invariant_table import InvariantEntry, InvariantTable
from src.models.precision import HPoint, PrecisionContext, TorsionVector
from src.models.rayclass import RayClass, RayClassGroup, Subgroup, Vector
from src.schemas.invariant import InvariantRow, InvariantTableExport
from src.services.modforms_service import modforms_service
from src.services.quadfield_service import quadfield_service
from src.services.rayclass_service import rayclass_service
from src.utils.exceptions import (
    DegenerateDifference,
    Indeterminate,
    NotCoprime,
    NotCoprimeRepresentative,
    OutOfScope,
)
from src.utils.helpers import dump_json, format_complex, format_decimal, to_csv
from src.utils.logger import setup_logger

logger = setup_logger()

Payload = Tuple[int, int, int, int, int, int, int, int, int]


def _evaluate_entry(payload: Payload):
    """
    Worker: (fricke value, 12N ln|g|) for one lattice

    The payload carries only integers so it pickles across processes:
    (d_K, A, B, C, N(c), N_least(m), digits, guard, max_escalations).
    """
    d, a, b, c, norm_c, least, digits, guard, escalations = payload
    field = Field(d)
    ctx = PrecisionContext(digits=digits, guard=guard, max_escalations=escalations)
    with ctx.workdps():
        omega = HPoint((b + c * field.tau()) / a)
        index = TorsionVector(Fraction(0), Fraction(norm_c, a))
        fricke_value = modforms_service.fricke(index, omega, ctx)
        log_abs = 12 * least * modforms_service.log_abs_siegel(index, omega, ctx)
    return fricke_value, log_abs


class InvariantService:
    """Service for invariant tables and Weber value comparisons"""

    def __init__(self):
        self._tables: Dict[Tuple[Ideal, int], InvariantTable] = {}

    # Single classes

    def _lattice(self, modulus: Ideal, representative: Ideal) -> Tuple[Ideal, TorsionVector]:
        """
        m * conj(c) = A Z + (B + C tau) Z, so m c^-1 has basis
        [(B + C tau)/N(c), A/N(c)] and 1 = 0*w1 + (N(c)/A)*w2
        """
        if not quadfield_service.is_coprime(representative, modulus):
            raise NotCoprimeRepresentative(f"{representative} meets {modulus}")
        lattice = modulus * representative.conjugate()
        index = TorsionVector(Fraction(0), Fraction(int(representative.norm()), lattice.a))
        return lattice, index

    def _payload(self, modulus: Ideal, representative: Ideal, ctx: PrecisionContext) -> Payload:
        lattice, _ = self._lattice(modulus, representative)
        return (
            modulus.field.d, lattice.a, lattice.b, lattice.c,
            int(representative.norm()), modulus.a,
            ctx.digits, ctx.guard, ctx.max_escalations,
        )

    def invariant_at(
        self,
        group: RayClassGroup,
        ray_class: RayClass,
        ctx: PrecisionContext,
        representative: Optional[Ideal] = None,
    ) -> Tuple[mpmath.mpc, mpmath.mpf]:
        """
        Fricke invariant f_m(C) and ln|g_m(C)| = 12 N ln|g_v(omega)|

        Args:
            group: Cl(m) with m != O_K
            ray_class: Class C
            ctx: Precision context
            representative: Integral ideal in C coprime to m (least norm if absent)

        Returns:
            Tuple (fricke value, log abs Siegel invariant)
        """
        if group.modulus.is_unit():
            raise OutOfScope("invariants need a nontrivial modulus")
        if representative is None:
            representative = rayclass_service.representative(group, ray_class)
        return _evaluate_entry(self._payload(group.modulus, representative, ctx))

    # Tables

    def invariant_table(self, group: RayClassGroup, ctx: PrecisionContext, workers: int = 1) -> InvariantTable:
        """
        Invariants of every class of Cl(m)

        Args:
            group: Cl(m) with m != O_K
            ctx: Precision context
            workers: Worker processes; results are gathered in class order

        Returns:
            InvariantTable
        """
        if group.modulus.is_unit():
            raise OutOfScope("invariants need a nontrivial modulus")
        cache_key = (group.modulus, ctx.digits)
        if cache_key in self._tables:
            return self._tables[cache_key]

        classes = group.classes
        reps = [rayclass_service.representative(group, c) for c in classes]
        payloads = [self._payload(group.modulus, rep, ctx) for rep in reps]
        if workers > 1 and len(payloads) > 1:
            with Pool(processes=workers) as pool:
                values = pool.map(_evaluate_entry, payloads)
        else:
            values = [_evaluate_entry(payload) for payload in payloads]

        table = InvariantTable(group, ctx)
        for ray_class, rep, (fricke_value, log_abs) in zip(classes, reps, values):
            _, index = self._lattice(group.modulus, rep)
            table.entries[ray_class.vector] = InvariantEntry(ray_class, rep, index, fricke_value, log_abs)
        self._tables[cache_key] = table
        logger.info(f"Invariant table for {group} at {ctx.digits} digits ({len(table)} classes)")
        return table

    def representative_drift(self, table: InvariantTable, ray_class: RayClass) -> Tuple[mpmath.mpf, mpmath.mpf]:
        """Distance between invariants from the first and second representative"""
        ctx = table.ctx
        second = rayclass_service.alternative_representative(table.group, ray_class)
        fricke_value, log_abs = self.invariant_at(table.group, ray_class, ctx, representative=second)
        with ctx.workdps():
            return (
                abs(fricke_value - table.fricke_value(ray_class)),
                abs(log_abs - table.log_abs_siegel(ray_class)),
            )

    # Weber differences

    def check_xi_input(self, field: Field, N: int, t: int) -> None:
        if math.gcd(N, t) != 1:
            raise NotCoprime(f"gcd({N}, {t}) != 1")
        if t % N in (1, N - 1):
            raise OutOfScope(f"t = {t} is +-1 modulo {N}")
        if field.d in EXCEPTIONAL_DISCRIMINANTS:
            raise OutOfScope(f"Weber differences are not defined this way for d = {field.d}")

    def xi_t(self, field: Field, N: int, t: int, ctx: PrecisionContext) -> mpmath.mpc:
        """
        xi_t = (h(t/N) - h(1/N))^(12N)

        Raises:
            DegenerateDifference: If the difference stays below 10^(-digits/2)
        """
        self.check_xi_input(field, N, t)
        current = ctx
        for attempt in range(ctx.max_escalations + 1):
            with current.workdps():
                difference = (
                    modforms_service.weber_at_fraction(field, t, N, current)
                    - modforms_service.weber_at_fraction(field, 1, N, current)
                )
                if abs(difference) >= current.lattice_tolerance:
                    return difference ** (12 * N)
            if attempt < ctx.max_escalations:
                logger.warning(f"h({t}/{N}) - h(1/{N}) unresolved at {current.digits} digits")
                current = current.escalated()
        logger.error(f"h({t}/{N}) and h(1/{N}) coincide to working precision")
        raise DegenerateDifference(f"h({t}/{N}) = h(1/{N}) numerically")

    def conjugate_xi(self, table: InvariantTable, t: int, shift: RayClass) -> mpmath.mpc:
        """xi_t^sigma(C') = (f(C_t C') - f(C'))^(12N)"""
        group = table.group
        N = group.level
        c_t = rayclass_service.c_t(group, t)
        with table.ctx.workdps():
            return (table.fricke_value(c_t * shift) - table.fricke_value(shift)) ** (12 * N)

    def log_abs_conjugate_xi(self, table: InvariantTable, t: int, shift: RayClass) -> mpmath.mpf:
        """ln|xi_t^sigma(C')| = 12N ln|f(C_t C') - f(C')|"""
        group = table.group
        N = group.level
        c_t = rayclass_service.c_t(group, t)
        with table.ctx.workdps():
            difference = table.fricke_value(c_t * shift) - table.fricke_value(shift)
            if abs(difference) < table.ctx.lattice_tolerance:
                raise DegenerateDifference(f"conjugate of xi_{t} vanishes at {shift}")
            return 12 * N * mpmath.log(abs(difference))

    # Fixing groups

    def _classify(self, table: InvariantTable, base: RayClass) -> Optional[List[Vector]]:
        """Members closer than the equal threshold, or None if any distance is in the band"""
        ctx = table.ctx
        members = []
        with ctx.workdps():
            reference = table.fricke_value(base)
            for entry in table.ordered_entries():
                distance = abs(entry.fricke_value - reference)
                if distance < ctx.equal_threshold:
                    members.append(entry.ray_class.vector)
                elif distance <= ctx.distinct_threshold:
                    logger.debug(f"distance {mpmath.nstr(distance, 5)} at {entry.ray_class} inside the band")
                    return None
        return members

    def fixing_group(self, group: RayClassGroup, ctx: PrecisionContext, workers: int = 1) -> Subgroup:
        """Stabilizer of f_m(C_1) under the Galois action"""
        return self.resolve_fixing_group(group, ctx, workers)[0]

    def resolve_fixing_group(
        self, group: RayClassGroup, ctx: PrecisionContext, workers: int = 1
    ) -> Tuple[Subgroup, InvariantTable]:
        """
        Fixing group of f_m(C_1) and the table that settled it

        Args:
            group: Cl(m)
            ctx: Precision context
            workers: Worker processes for the table

        Returns:
            Tuple (subgroup {C' : |f(C') - f(C_1)| < equal threshold}, table)

        Raises:
            Indeterminate: If a distance stays in the hysteresis band
        """
        current = ctx
        for attempt in range(ctx.max_escalations + 1):
            table = self.invariant_table(group, current, workers)
            members = self._classify(table, group.identity)
            if members is not None:
                subgroup = Subgroup(group, frozenset(members))
                if not subgroup.is_closed():
                    logger.error(f"fixing set of {group} is not a subgroup")
                    raise Indeterminate("numerical fixing set is not closed under the group law")
                logger.info(f"Fixing group in {group}: order {subgroup.order}")
                return subgroup, table
            if attempt < ctx.max_escalations:
                logger.warning(f"fixing group of {group} unresolved at {current.digits} digits, escalating")
                current = current.escalated()
        logger.error(f"fixing group of {group} unresolved after {ctx.max_escalations} escalations")
        raise Indeterminate(f"hysteresis band unresolved for {group}")

    def distinct_value_count(self, table: InvariantTable) -> int:
        """Number of numerically distinct Fricke values in the table"""
        ctx = table.ctx
        representatives: List[mpmath.mpc] = []
        with ctx.workdps():
            for entry in table.ordered_entries():
                if all(abs(entry.fricke_value - value) >= ctx.equal_threshold for value in representatives):
                    representatives.append(entry.fricke_value)
        return len(representatives)

    def intersection_with_hilbert(self, group: RayClassGroup, fixing: Subgroup) -> Subgroup:
        """Cl(K_(N)/H) meet the fixing group"""
        return rayclass_service.subgroup_hilbert(group).intersection(fixing)

    # Hilbert class field values

    def hilbert_log_abs_j(self, field: Field, ctx: PrecisionContext) -> Dict[Vector, Tuple[mpmath.mpf, mpmath.mpf]]:
        """
        (ln|j(c)|, ln|j(c) - 1728|) for every class c of Cl(O_K)

        For the reduced form ideal [a, b' + tau] of c the lattice is
        homothetic to [(b' + tau)/a, 1].
        """
        class_group = rayclass_service.class_group(field)
        values = {}
        with ctx.workdps():
            for form in quadfield_service.reduced_forms(field.d):
                ideal = quadfield_service.ideal_of_form(field, form)
                omega = HPoint((ideal.b + field.tau()) / ideal.a)
                j = modforms_service.j_invariant(omega, ctx)
                values[class_group.log(ideal)] = (mpmath.log(abs(j)), mpmath.log(abs(j - 1728)))
        return values

    # Export

    def export_table(self, table: InvariantTable, fmt: str = "json") -> str:
        """
        Render a table as JSON or CSV

        Args:
            table: InvariantTable
            fmt: "json" or "csv"

        Returns:
            str document
        """
        digits = table.ctx.digits
        rows = [
            InvariantRow(
                ray_class=list(entry.ray_class.vector),
                representative=str(entry.representative),
                index=[str(entry.index.r1), str(entry.index.r2)],
                fricke_value=format_complex(entry.fricke_value, digits),
                log_abs_siegel=format_decimal(entry.log_abs_siegel, digits),
            )
            for entry in table.ordered_entries()
        ]
        export = InvariantTableExport(
            d_K=table.group.field.d,
            modulus=str(table.modulus),
            snf=list(table.group.snf),
            digits=digits,
            rows=rows,
        )
        if fmt == "csv":
            return to_csv(row.model_dump(mode="json") for row in export.rows)
        return dump_json(export.model_dump(mode="json"))


# Singleton instance
invariant_service = InvariantService()
