"""Exact representation of the 24-element single-qubit Clifford group.

The group is materialized three ways at once: as 2x2 complex unitaries
(products of elementary quarter/half-turn rotations), as exact signed
permutations of the Cartesian Pauli axes, and as integer composition /
inverse lookup tables.  The signed-permutation form is the authoritative
one; the unitaries are validated against it at construction time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

_PAULIS = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
_AXES = ("X", "Y", "Z")

#: Unitary-consistency tolerance for construction-time validation.
MATRIX_TOL = 1e-12

#: Global-phase-invariant identity tolerance: |Tr(A^dag B)|/2 = 1 within this.
PHASE_TOL = 1e-10


class CliffordConstructionError(RuntimeError):
    """A tabulated axis action disagrees with matrix conjugation."""


@dataclass(frozen=True)
class PauliAxis:
    """A signed Cartesian/Pauli axis, e.g. -Y."""

    axis: str
    sign: int

    def __post_init__(self):
        if self.axis not in _AXES:
            raise ValueError(f"axis must be one of {_AXES}, got {self.axis!r}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    def as_vector(self) -> np.ndarray:
        v = np.zeros(3, dtype=np.int64)
        v[_AXES.index(self.axis)] = self.sign
        return v

    def matrix(self) -> np.ndarray:
        return self.sign * _PAULIS[self.axis]

    def __str__(self):
        return ("+" if self.sign > 0 else "-") + self.axis


@dataclass(frozen=True)
class CliffordElement:
    """One group element: unitary matrix plus exact action on Pauli axes."""

    index: int
    matrix: np.ndarray
    pauli_action: dict  # axis label -> PauliAxis
    name: str = ""

    @property
    def rotation(self) -> np.ndarray:
        """3x3 signed permutation; column a is the image of axis a."""
        return np.stack(
            [self.pauli_action[a].as_vector() for a in _AXES], axis=1
        )


@dataclass(frozen=True)
class SequenceSpec:
    """A length-J Clifford index sequence composing to the identity."""

    indices: tuple

    @property
    def J(self) -> int:
        return len(self.indices)


# (name, action on (X, Y, Z), generator word).  Words are matrix products
# read left to right; the rightmost factor acts first under conjugation.
_TABLE = [
    ("I", ("+X", "+Y", "+Z"), ()),
    ("X", ("+X", "-Y", "-Z"), ("X",)),
    ("Y", ("-X", "+Y", "-Z"), ("Y",)),
    ("Z", ("-X", "-Y", "+Z"), ("Z",)),
    ("Rx+", ("+X", "-Z", "+Y"), ("Rx+",)),
    ("Ry+", ("+Z", "+Y", "-X"), ("Ry+",)),
    ("Rz+", ("-Y", "+X", "+Z"), ("Rz+",)),
    ("Rx-", ("+X", "+Z", "-Y"), ("Rx-",)),
    ("Ry-", ("-Z", "+Y", "+X"), ("Ry-",)),
    ("Rz-", ("+Y", "-X", "+Z"), ("Rz-",)),
    ("", ("-X", "-Z", "-Y"), ("Z", "Rx+")),
    ("", ("-X", "+Z", "+Y"), ("Z", "Rx-")),
    ("", ("-Y", "-X", "-Z"), ("Rz+", "X")),
    ("", ("+Y", "+X", "-Z"), ("Rz-", "X")),
    ("", ("-Y", "-Z", "+X"), ("Rz+", "Rx+")),
    ("", ("-Y", "+Z", "-X"), ("Rz+", "Rx-")),
    ("", ("-Z", "-X", "+Y"), ("Rx+", "Rz-")),
    ("", ("-Z", "-Y", "-X"), ("Z", "Ry-")),
    ("", ("-Z", "+X", "-Y"), ("Rz+", "Ry-")),
    ("", ("+Z", "-X", "-Y"), ("Rz-", "Ry+")),
    ("H", ("+Z", "-Y", "+X"), ("Z", "Ry+")),
    ("", ("+Y", "-Z", "-X"), ("Rz-", "Rx+")),
    ("", ("+Z", "+X", "+Y"), ("Rz+", "Ry+")),
    ("", ("+Y", "+Z", "+X"), ("Rz-", "Rx-")),
]


def _rotation_matrix(axis: str, theta: float) -> np.ndarray:
    """exp(-i theta sigma_axis / 2)."""
    sigma = _PAULIS[axis.upper()]
    return np.cos(theta / 2) * IDENTITY_2 - 1j * np.sin(theta / 2) * sigma


def _elementary(token: str) -> np.ndarray:
    # "Clockwise looking down the axis toward the origin" corresponds to a
    # negative angle in the exp(-i theta sigma/2) parametrization; the sign
    # is pinned by validating against the tabulated axis actions.
    if token in ("X", "Y", "Z"):
        return _rotation_matrix(token, np.pi)
    axis, sign = token[1], token[2]
    theta = -np.pi / 2 if sign == "+" else np.pi / 2
    return _rotation_matrix(axis, theta)


def _parse_axis(label: str) -> PauliAxis:
    return PauliAxis(axis=label[1], sign=1 if label[0] == "+" else -1)


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 - |Tr(A^dag B)|/2: zero iff A = B up to a global phase."""
    return 1.0 - abs(np.trace(a.conj().T @ b)) / 2.0


def conjugation_action(matrix: np.ndarray) -> dict:
    """Recover the signed-permutation action of a unitary by conjugating
    each Pauli matrix, or raise if some image is not a signed Pauli."""
    action = {}
    for label in _AXES:
        image = matrix @ _PAULIS[label] @ matrix.conj().T
        for target in _AXES:
            for sign in (1, -1):
                if np.max(np.abs(image - sign * _PAULIS[target])) <= MATRIX_TOL:
                    action[label] = PauliAxis(target, sign)
        if label not in action:
            raise CliffordConstructionError(
                f"conjugated {label} image is not a signed Pauli matrix"
            )
    return action


class CliffordTable:
    """The full group: elements, inverse lookup, and composition table.

    Immutable after construction; safe to share read-only across workers.
    Indices are 1-based throughout, matching the tabulated numbering.
    """

    def __init__(self, elements, inverse_index, composition_table):
        self.elements = tuple(elements)
        self.inverse_index = tuple(inverse_index)
        self.composition_table = composition_table
        self.composition_table.setflags(write=False)

    def element(self, index: int) -> CliffordElement:
        return self.elements[index - 1]

    def inverse(self, index: int) -> int:
        return self.inverse_index[index - 1]

    def compose(self, i: int, j: int) -> int:
        """Index of element(i) @ element(j)."""
        return int(self.composition_table[i - 1, j - 1])

    def matrix_product(self, indices) -> np.ndarray:
        out = IDENTITY_2.copy()
        for i in indices:
            out = out @ self.element(i).matrix
        return out

    def sample_sequence(self, J: int, rng: np.random.Generator) -> SequenceSpec:
        """Uniform sequence of J Cliffords whose product is the identity.

        The first J-1 indices are i.i.d. uniform on 1..24; the final index
        is the unique element closing the product to the identity.
        """
        if J < 2:
            raise ValueError(f"J must be >= 2, got {J}")
        head = rng.integers(1, 25, size=J - 1)
        running = 1
        for i in head:
            running = self.compose(running, int(i))
        closing = self.inverse(running)
        return SequenceSpec(indices=tuple(int(i) for i in head) + (closing,))

    def twirl_directions(self, seq: SequenceSpec, axis: str = "Z") -> np.ndarray:
        """(J, 3) integer array of the signed Cartesian directions obtained
        by conjugating `axis` with each cumulative Clifford prefix.

        Row m is the direction for step m+1 (prefix of length m); row 0 is
        always the untouched axis.  Computed purely with integer signed
        permutations so long sequences stay exact.
        """
        start = _AXES.index(axis.upper())
        directions = np.empty((seq.J, 3), dtype=np.int64)
        prefix = np.eye(3, dtype=np.int64)
        for m, index in enumerate(seq.indices):
            directions[m] = prefix[:, start]
            prefix = prefix @ self.element(index).rotation
        return directions

    def check_closure(self, seq: SequenceSpec) -> bool:
        return phase_distance(self.matrix_product(seq.indices), IDENTITY_2) <= PHASE_TOL


def build_table() -> CliffordTable:
    """Construct and validate the 24-element group from the generator words."""
    elements = []
    for n, (name, action_labels, word) in enumerate(_TABLE, start=1):
        matrix = IDENTITY_2.copy()
        for token in word:
            matrix = matrix @ _elementary(token)
        action = {a: _parse_axis(lbl) for a, lbl in zip(_AXES, action_labels)}

        unitarity = np.max(np.abs(matrix.conj().T @ matrix - IDENTITY_2))
        if unitarity > MATRIX_TOL:
            raise CliffordConstructionError(f"element {n} not unitary: {unitarity}")
        if conjugation_action(matrix) != action:
            raise CliffordConstructionError(
                f"element {n} ({name or word}): tabulated action disagrees "
                "with matrix conjugation"
            )
        element = CliffordElement(index=n, matrix=matrix, pauli_action=action, name=name)
        if round(np.linalg.det(element.rotation)) != 1:
            raise CliffordConstructionError(
                f"element {n} is not a proper rotation (det != +1)"
            )
        elements.append(element)

    by_rotation = {e.rotation.tobytes(): e.index for e in elements}
    if len(by_rotation) != 24:
        raise CliffordConstructionError("duplicate elements in the table")

    composition = np.zeros((24, 24), dtype=np.int64)
    for a in elements:
        for b in elements:
            product = (a.rotation @ b.rotation).tobytes()
            if product not in by_rotation:
                raise CliffordConstructionError("group is not closed")
            c = by_rotation[product]
            composition[a.index - 1, b.index - 1] = c
            # Spot-check that the matrix product matches up to global phase.
            target = elements[c - 1].matrix
            if phase_distance(a.matrix @ b.matrix, target) > PHASE_TOL:
                raise CliffordConstructionError(
                    f"matrix composition {a.index}*{b.index} does not match "
                    f"element {c} up to phase"
                )

    inverse_index = [0] * 24
    for a in elements:
        inv = int(np.argwhere(composition[a.index - 1] == 1)[0, 0]) + 1
        inverse_index[a.index - 1] = inv

    return CliffordTable(elements, inverse_index, composition)
