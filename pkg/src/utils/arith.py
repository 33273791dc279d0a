"""
Integer Arithmetic Helpers
Smith normal form, two-dimensional lattice HNF and symbol computations
"""

from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple
import math

import numpy as np
from sympy import legendre_symbol
from sympy.core.intfunc import igcdex
from sympy.ntheory.modular import crt


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Smith normal form with unimodular transforms

    The input is transformed to a diagonal matrix D by integer matrices U
    and V of determinant +-1, written as

        D = U A V

    with D[i, i] >= 0 and D[i, i] | D[i+1, i+1].

    Args:
        matrix: Integer matrix A

    Returns:
        Tuple (U, D, V) of object-dtype integer arrays
    """
    D = np.array(matrix, dtype=object)
    if D.ndim != 2:
        raise ValueError("smith_normal_form expects a 2D matrix")
    rows, cols = D.shape
    U = np.eye(rows, dtype=object)
    V = np.eye(cols, dtype=object)

    for t in range(min(rows, cols)):
        while True:
            candidates = [
                (abs(D[i, j]), i, j)
                for i in range(t, rows)
                for j in range(t, cols)
                if D[i, j] != 0
            ]
            if not candidates:
                return U, D, V
            _, i, j = min(candidates)
            if i != t:
                D[[t, i]] = D[[i, t]]
                U[[t, i]] = U[[i, t]]
            if j != t:
                D[:, [t, j]] = D[:, [j, t]]
                V[:, [t, j]] = V[:, [j, t]]

            pivot = D[t, t]
            clean = True
            for i in range(t + 1, rows):
                q = D[i, t] // pivot
                if q:
                    D[i, :] = D[i, :] - q * D[t, :]
                    U[i, :] = U[i, :] - q * U[t, :]
                if D[i, t] != 0:
                    clean = False
            for j in range(t + 1, cols):
                q = D[t, j] // pivot
                if q:
                    D[:, j] = D[:, j] - q * D[:, t]
                    V[:, j] = V[:, j] - q * V[:, t]
                if D[t, j] != 0:
                    clean = False
            if not clean:
                continue

            # Pivot must divide the rest of the matrix
            offending = next(
                (
                    i
                    for i in range(t + 1, rows)
                    for j in range(t + 1, cols)
                    if D[i, j] % pivot != 0
                ),
                None,
            )
            if offending is not None:
                D[t, :] = D[t, :] + D[offending, :]
                U[t, :] = U[t, :] + U[offending, :]
                continue
            break

        if D[t, t] < 0:
            D[t, :] = -D[t, :]
            U[t, :] = -U[t, :]

    return U, D, V


def lattice_hnf(vectors: Iterable[Tuple[int, int]]) -> Tuple[int, int, int]:
    """
    Hermite normal form of a full-rank sublattice of Z^2

    The lattice is returned as A*(1, 0)Z + (B, C)Z with A, C > 0 and
    0 <= B < A.

    Args:
        vectors: Generating vectors (x, y)

    Returns:
        Tuple (A, B, C)

    Raises:
        ValueError: If the vectors do not span a rank-2 lattice
    """
    A, B, C = 0, 0, 0
    for x, y in vectors:
        x, y = int(x), int(y)
        if y == 0:
            A = math.gcd(A, x)
            continue
        if C == 0:
            B, C = x, y
            if C < 0:
                B, C = -B, -C
            continue
        s, t, g = igcdex(C, y)
        s, t, g = int(s), int(t), int(g)
        new_b = s * B + t * x
        # (y/g)(B, C) - (C/g)(x, y) has vanishing second coordinate
        A = math.gcd(A, (y // g) * B - (C // g) * x)
        B, C = new_b, g
    if A == 0 or C == 0:
        raise ValueError("vectors do not span a full-rank lattice")
    return A, B % A, C


def kronecker_at(d: int, p: int) -> int:
    """
    Kronecker symbol (d/p) for a prime p

    Args:
        d: Discriminant
        p: Prime

    Returns:
        -1, 0 or 1
    """
    if p == 2:
        if d % 2 == 0:
            return 0
        return 1 if d % 8 in (1, 7) else -1
    return int(legendre_symbol(d % p, p))


def nearest_integer(value: Fraction) -> int:
    """Round half up"""
    return math.floor(value + Fraction(1, 2))


def solve_crt(moduli: List[int], residues: List[int]) -> int:
    """
    Smallest nonnegative solution of a system of congruences

    Args:
        moduli: Pairwise coprime moduli
        residues: Residues

    Returns:
        int: Solution modulo the product of the moduli
    """
    solution = crt(moduli, residues)
    if solution is None:
        raise ValueError(f"no solution for residues {residues} modulo {moduli}")
    return int(solution[0])


def split_two_three(n: int) -> Tuple[int, int, int]:
    """
    Write n = 2^a 3^b l with gcd(6, l) = 1

    Returns:
        Tuple (a, b, l)
    """
    a = 0
    while n % 2 == 0:
        n //= 2
        a += 1
    b = 0
    while n % 3 == 0:
        n //= 3
        b += 1
    return a, b, n
